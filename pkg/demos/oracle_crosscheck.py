"""The symplectic pipeline against its two independent reference routes.

Route one expands the channel to second order in the coupling with
adaptive quadrature; the leftover must shrink as the fourth power.
Route two integrates the full probe-field Schrodinger equation in a
truncated number basis and reads the covariance from moments.  Neither
route shares integrator code with the pipeline it checks.

The same suite runs as `cavitherm verify` from the command line.
"""

import numpy as np

from cavitherm import (
    CellConfig,
    IntegratorConfig,
    dyson_channel,
    fock_vacuum_response,
    integrate_cavity,
    reduce_channel,
)
from cavitherm.channels import apply_channel

tight = IntegratorConfig(richardson_tol=1e-13, max_doublings=14)

print("perturbative route, lambda0 = 1e-3, N = 3:")
cfg = CellConfig(a0=1.0, omega0=np.pi / 16, lambda0=1e-3, n_modes=3,
                 integrator=tight)
for cavity in (1, 2):
    exact = reduce_channel(integrate_cavity(cavity, cfg))
    pert = dyson_channel(cavity, cfg)
    res = max(np.max(np.abs(pert.t_matrix - exact.t_matrix)),
              np.max(np.abs(pert.r_matrix - exact.r_matrix)))
    print(f"  cavity {cavity}: residual/lambda0^2 = {res / cfg.lambda0**2:.3e}")

print("\nfourth-power shrinkage of the second-order residual:")
prev = None
for lam in (4e-3, 8e-3, 1.6e-2):
    c = CellConfig(a0=1.0, omega0=np.pi / 16, lambda0=lam, n_modes=3,
                   integrator=tight)
    exact = reduce_channel(integrate_cavity(1, c))
    pert = dyson_channel(1, c)
    res = max(np.max(np.abs(pert.t_matrix - exact.t_matrix)),
              np.max(np.abs(pert.r_matrix - exact.r_matrix)))
    ratio = "" if prev is None else f"   ratio {res / prev:.2f} (expect ~16)"
    print(f"  lambda0 = {lam:.4f}: residual {res:.3e}{ratio}")
    prev = res

print("\nnumber-basis route, lambda0 = 0.05, N = 2, cutoff 8:")
cfg = CellConfig(a0=1.0, omega0=np.pi / 16, lambda0=0.05, n_modes=2,
                 integrator=tight)
for cavity in (1, 2):
    gaussian = apply_channel(reduce_channel(integrate_cavity(cavity, cfg)),
                             np.eye(2))
    fock = fock_vacuum_response(cavity, cfg, cutoff=8)
    print(f"  cavity {cavity}: max covariance deviation "
          f"{np.max(np.abs(fock - gaussian)):.3e}")
