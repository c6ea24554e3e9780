"""Independent cross-checks for the cavity channels.

Two oracles that share no evolution numerics with the production
integrator in cavitherm.cell:

* a second-order perturbative (Dyson) channel evaluated with nested
  adaptive quadrature, exact in the weak-coupling limit, and
* a truncated Fock-space Schrodinger evolution of probe plus a few
  field modes, exact in the small-cutoff limit.

Both are intended for few-mode, test-scale configurations; they scale
poorly and are not part of the production sweep path.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse
from scipy.integrate import quad_vec, solve_ivp

from .cell import CellConfig, cell_kinematics, trajectory, mode_coupling
from .channels import GaussianChannel, compose_channels, rotation_channel
from .errors import CutoffNotConverged, IntegratorNoConvergence, QuadratureError

__all__ = [
    "dyson_channel",
    "dyson_cell_channel",
    "fock_vacuum_response",
    "FOCK_DIMENSION_LIMIT",
]

# (cutoff+1)**(n_modes+1) complex amplitudes; beyond this the dense ODE
# state no longer fits comfortably in memory/time for a test run.
FOCK_DIMENSION_LIMIT = 200_000


def _mode_frame(tau, config):
    """Coupling amplitudes and phase-space angles at one proper time.

    Returns (g, phase, u) where g[n] and phase[n] are the coupling and
    accumulated mode phase for mode n+1, and u is the probe quadrature
    direction (cos O tau, sin O tau) at global proper time tau.
    """
    t_loc, x_loc, _ = trajectory(tau, config.a0)
    n = np.arange(1, config.n_modes + 1)
    g = np.array([mode_coupling(k, x_loc, config) for k in n])
    phase = n * np.pi * t_loc
    u = np.array([np.cos(config.omega0 * tau), np.sin(config.omega0 * tau)])
    return g, phase, u


def _quad(f, lo, hi, epsabs):
    value, err = quad_vec(f, lo, hi, epsabs=epsabs, epsrel=0.0, limit=2000)
    if not np.isfinite(err) or err > 50 * epsabs:
        raise QuadratureError(
            f"quadrature error estimate {err:.3e} exceeds budget {epsabs:.3e}"
        )
    return value


def dyson_channel(cavity, config, epsabs=1e-13):
    """Second-order weak-coupling channel for one cavity crossing.

    Evaluates the Dyson-series probe block to second order in the
    coupling via nested adaptive quadrature: the linear part is
    I + (ordered double integral of the two-point kernel), the noise
    part is assembled from the first-order probe-field overlaps, one
    2x2 block per field mode. Accurate to O(lambda0**4).
    """
    if cavity not in (1, 2):
        raise ValueError("cavity must be 1 or 2")
    kin = cell_kinematics(config.a0)
    lo = 0.0 if cavity == 1 else kin.tau_max
    hi = kin.tau_max if cavity == 1 else 2.0 * kin.tau_max
    j2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

    def ordered_block(tau1):
        g1, phase1, u1 = _mode_frame(tau1, config)

        def inner(tau2):
            g2, phase2, u2 = _mode_frame(tau2, config)
            k = np.dot(g1 * g2, np.sin(phase2 - phase1))
            return k * u2

        row = _quad(inner, lo, tau1, epsabs / 10.0)
        return np.outer(j2 @ u1, row).ravel()

    t_block = np.eye(2) + _quad(ordered_block, lo, hi, epsabs).reshape(2, 2)

    def overlap_stack(tau):
        g, phase, u = _mode_frame(tau, config)
        v = np.empty((config.n_modes, 2))
        v[:, 0] = np.cos(phase)
        v[:, 1] = np.sin(phase)
        return (g[:, None, None] * u[None, :, None] * v[:, None, :]).ravel()

    w = _quad(overlap_stack, lo, hi, epsabs).reshape(config.n_modes, 2, 2)
    r_block = np.zeros((2, 2))
    for wn in w:
        jw = j2 @ wn
        r_block += jw @ jw.T
    return GaussianChannel(t_matrix=t_block, r_matrix=r_block)


def dyson_cell_channel(config, epsabs=1e-13):
    """Weak-coupling limit of the full two-cavity cell channel."""
    kin = cell_kinematics(config.a0)
    inner = compose_channels(dyson_channel(2, config, epsabs),
                             dyson_channel(1, config, epsabs))
    return compose_channels(rotation_channel(2.0 * kin.probe_phase(config.omega0)), inner)


def _fock_covariance(cavity, config, cutoff, ode_rtol, ode_atol):
    dim = cutoff + 1
    ladder = scipy.sparse.diags(np.sqrt(np.arange(1, dim)), 1)
    q1 = np.sqrt(0.5) * (ladder + ladder.T)
    p1 = (ladder - ladder.T) / (1j * np.sqrt(2.0))
    eye = scipy.sparse.identity(dim)

    def embed(op, slot):
        factors = [op if k == slot else eye for k in range(config.n_modes + 1)]
        out = factors[0]
        for f in factors[1:]:
            out = scipy.sparse.kron(out, f)
        return out.tocsr()

    probe_q = embed(q1, 0)
    probe_p = embed(p1, 0)
    mode_q = [embed(q1, k + 1) for k in range(config.n_modes)]
    mode_p = [embed(p1, k + 1) for k in range(config.n_modes)]
    qq = [(probe_q @ m).tocsr() for m in mode_q]
    qp = [(probe_q @ m).tocsr() for m in mode_p]
    pq = [(probe_p @ m).tocsr() for m in mode_q]
    pp = [(probe_p @ m).tocsr() for m in mode_p]

    def rhs(tau, psi):
        g, phase, u = _mode_frame(tau, config)
        cos_v, sin_v = np.cos(phase), np.sin(phase)
        h = None
        for k in range(config.n_modes):
            hk = g[k] * (u[0] * cos_v[k] * qq[k] + u[0] * sin_v[k] * qp[k]
                         + u[1] * cos_v[k] * pq[k] + u[1] * sin_v[k] * pp[k])
            h = hk if h is None else h + hk
        return -1j * (h @ psi)

    kin = cell_kinematics(config.a0)
    span = (0.0, kin.tau_max) if cavity == 1 else (kin.tau_max, 2.0 * kin.tau_max)
    psi0 = np.zeros(dim ** (config.n_modes + 1), dtype=complex)
    psi0[0] = 1.0
    sol = solve_ivp(rhs, span, psi0, method="DOP853", rtol=ode_rtol, atol=ode_atol)
    if not sol.success:
        raise IntegratorNoConvergence(f"Fock ODE solver failed: {sol.message}")
    psi = sol.y[:, -1]
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > 1e-8:
        raise IntegratorNoConvergence(f"Fock ODE norm drift {drift:.3e} exceeds 1e-8")

    ops = (probe_q, probe_p)
    mean = [np.vdot(psi, op @ psi).real for op in ops]
    sigma = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            sym = ops[i] @ (ops[j] @ psi) + ops[j] @ (ops[i] @ psi)
            sigma[i, j] = np.vdot(psi, sym).real - 2.0 * mean[i] * mean[j]
    return sigma


def fock_vacuum_response(cavity, config, cutoff=8, ode_rtol=1e-10, ode_atol=1e-12,
                         convergence_tol=1e-6):
    """Probe covariance after one cavity crossing from joint vacuum.

    Evolves the truncated number-basis Schrodinger equation for the
    probe and all field modes of `config` and reads off the probe
    covariance. The run is repeated at double the cutoff and must agree
    entrywise within convergence_tol, otherwise CutoffNotConverged is
    raised. Use few modes and moderate coupling: the state dimension is
    (cutoff+1)**(n_modes+1), capped at FOCK_DIMENSION_LIMIT.
    """
    if cavity not in (1, 2):
        raise ValueError("cavity must be 1 or 2")
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    worst = (2 * cutoff + 1) ** (config.n_modes + 1)
    if worst > FOCK_DIMENSION_LIMIT:
        raise ValueError(
            f"state dimension {worst} at doubled cutoff exceeds {FOCK_DIMENSION_LIMIT}; "
            "reduce n_modes or cutoff"
        )
    sigma = _fock_covariance(cavity, config, cutoff, ode_rtol, ode_atol)
    sigma_fine = _fock_covariance(cavity, config, 2 * cutoff, ode_rtol, ode_atol)
    gap = np.max(np.abs(sigma - sigma_fine))
    if gap > convergence_tol:
        raise CutoffNotConverged(
            f"covariance moved {gap:.3e} when doubling cutoff {cutoff}"
        )
    return sigma_fine
