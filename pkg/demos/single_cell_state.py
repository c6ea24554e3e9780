"""One probe pass through a cavity cell, step by step.

Builds the single-cell Gaussian channel at moderate acceleration, finds
the covariance it drives the probe toward, and prints the standard-form
decomposition, the temperature, and every thermality diagnostic.
"""

import numpy as np

from cavitherm import (
    CellConfig,
    build_cell,
    cell_kinematics,
    fixed_point,
    fock_populations,
    standard_form,
    thermality_report,
)
from cavitherm.channels import linear_spectral_radius

config = CellConfig(a0=1.0, omega0=np.pi / 16, lambda0=0.01, n_modes=20)

kin = cell_kinematics(config.a0)
print(f"scenario: a0={config.a0}, omega0={config.omega0:.6f}, "
      f"lambda0={config.lambda0}, N={config.n_modes}")
print(f"half-cell crossing: tau_max={kin.tau_max:.6f} proper, "
      f"t_max={kin.t_max:.6f} lab, peak gamma={kin.gamma_max}")
print(f"accumulated probe phase per cavity: {config.omega0 * kin.tau_max:.6f}")

cell = build_cell(config)
np.set_printoptions(precision=10, suppress=True)
print("\nprobe channel for one full cell (T, R):")
print(cell.channel.t_matrix)
print(cell.channel.r_matrix)
print(f"contraction spectral radius: {linear_spectral_radius(cell.channel):.12f}")
print(f"symplectic deviation of the (2N+2)-dim propagators: "
      f"{cell.symplectic_deviation:.3e}")

sigma = fixed_point(cell.channel)
print("\nasymptotic probe covariance (vacuum = identity):")
print(sigma)

form = standard_form(sigma)
print(f"\nstandard form: nu={form.nu:.12f}, r={form.r:.3e}, "
      f"theta={form.theta:.6f}")

report = thermality_report(form, config.omega0)
print(f"temperature T0 = {report.t0:.12f}")
print(f"squeezing energy fraction delta = {report.delta:.3e}")
print(f"predicted excited-state-ratio spread epsilon = {report.epsilon:.3e}")

p0, p1, p2 = fock_populations(form.nu, form.r)
print(f"\nnumber-state populations: p0={p0:.9f}, p1={p1:.9f}, p2={p2:.9f}")
print(f"temperature from p0/p1 ratio: {report.t_edr_01:.12f}")
print(f"temperature from p0/p2 ratio: {report.t_edr_02:.12f}")
print(f"temperature from p1/p2 ratio: {report.t_edr_12:.12f}")
print("\nthe three ratio thermometers agree with T0 to the printed digits;")
print("the residual squeezing r is what separates them.")
