"""One cell of the probe's journey: two crossed cavities plus free rotation.

The probe accelerates uniformly through the first cavity (proper
acceleration a0 in units of c^2/L), decelerates mirror-symmetrically
through the second, and the pattern repeats.  Everything is expressed in
dimensionless variables: lengths in cavity lengths L, times in L/c,
hbar = c = k_B = 1.  Cavity field modes are Dirichlet, omega_n = n pi.

The interaction-picture coupling between the probe quadratures and the
mode quadratures is integrated into a symplectic matrix on
(probe, mode_1, ..., mode_N) phase space; tracing out the field vacuum
then reduces each cavity to a Gaussian channel on the probe alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import GaussianChannel, compose_channels, reduce_channel, rotation_channel
from .errors import IntegratorNoConvergence
from .phase_space import symplectic_deviation

# Hard ceiling on S Omega S^T - Omega for any integrated cavity matrix.
SYMPLECTIC_TOL = 1e-9

# Gauss-Legendre node offsets within a step, for the fourth-order scheme.
_GL_NODES = (0.5 - math.sqrt(3.0) / 6.0, 0.5 + math.sqrt(3.0) / 6.0)

_CHUNK = 512


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-doubling controls for the time-ordered cavity integration.

    initial_steps is a lower bound on the first resolution; the actual
    starting resolution is also floored by the total oscillation phase
    swept by the fastest mode, so that no oscillation is undersampled at
    the first Richardson rung.
    """

    initial_steps: int = 256
    richardson_tol: float = 1e-9
    max_doublings: int = 8
    method: str = "gl4"

    def __post_init__(self):
        if self.initial_steps < 1:
            raise ValueError(f"initial_steps must be >= 1, got {self.initial_steps}")
        if not (0.0 < self.richardson_tol < 1.0):
            raise ValueError(f"richardson_tol out of range: {self.richardson_tol}")
        if not (0 <= self.max_doublings <= 30):
            raise ValueError(f"max_doublings out of range: {self.max_doublings}")
        if self.method not in ("gl4", "midpoint"):
            raise ValueError(f"unknown integrator method {self.method!r}")


@dataclass(frozen=True)
class CellConfig:
    """Physical and numerical parameters of one cavity cell.

    a0:      proper acceleration in units of c^2/L.
    omega0:  probe gap in units of c/L.
    lambda0: probe-field coupling in units of sqrt(hbar c)/L.
    n_modes: number of field modes kept per cavity.
    """

    a0: float
    omega0: float
    lambda0: float = 0.01
    n_modes: int = 20
    integrator: IntegratorConfig = field(default=IntegratorConfig())

    def __post_init__(self):
        if not (np.isfinite(self.a0) and self.a0 > 0.0):
            raise ValueError(f"a0 must be positive and finite, got {self.a0}")
        if not (np.isfinite(self.omega0) and self.omega0 > 0.0):
            raise ValueError(f"omega0 must be positive and finite, got {self.omega0}")
        if not (np.isfinite(self.lambda0) and self.lambda0 >= 0.0):
            raise ValueError(f"lambda0 must be nonnegative, got {self.lambda0}")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError(f"n_modes must be a positive integer, got {self.n_modes}")


@dataclass(frozen=True)
class CellKinematics:
    """Derived kinematic quantities of one cavity crossing."""

    a0: float
    tau_max: float      # proper time to cross one cavity
    t_max: float        # lab time to cross one cavity
    gamma_max: float    # Lorentz factor at the far wall
    m_ratio: float      # Doppler ratio M = sqrt(1 + 2/a0)

    def probe_phase(self, omega0: float) -> float:
        """Free probe phase Theta accumulated over one cavity crossing."""
        return omega0 * self.tau_max

    def mode_sweep(self, omega0: float) -> float:
        """Number of mode spacings the Doppler-shifted gap sweeps, a0*omega0/pi."""
        return self.a0 * omega0 / math.pi


def cell_kinematics(a0: float) -> CellKinematics:
    """Kinematics of a uniformly accelerated crossing starting at rest.

    x(tau) = (cosh(a0 tau) - 1)/a0 reaches the far wall x = 1 at
    tau_max = arccosh(1 + a0)/a0; the lab crossing time is
    t_max = sqrt(1 + 2/a0) and the wall Lorentz factor is 1 + a0.
    """
    if not (np.isfinite(a0) and a0 > 0.0):
        raise ValueError(f"a0 must be positive and finite, got {a0}")
    # arccosh(1 + a0) via log1p, accurate for all positive a0
    tau_max = math.log1p(a0 + math.sqrt(a0 * (a0 + 2.0))) / a0
    t_max = math.sqrt(1.0 + 2.0 / a0)
    return CellKinematics(a0, tau_max, t_max, 1.0 + a0, math.sqrt(1.0 + 2.0 / a0))


def trajectory(tau: float, a0: float) -> tuple[float, float, int]:
    """Lab time and position within the current cavity at proper time tau.

    Covers one full cell 0 <= tau <= 2 tau_max.  In the first cavity the
    probe accelerates from rest at the left wall; the second cavity is
    the mirror image (deceleration), with position measured from its own
    left wall and lab time restarted at entry.

    Returns (t_local, x_local, cavity_index).  Exactly at tau = tau_max
    the probe is assigned to cavity 2 (entering at x_local = 0).
    """
    kin = cell_kinematics(a0)
    if not (0.0 <= tau <= 2.0 * kin.tau_max * (1.0 + 1e-12)):
        raise ValueError(f"tau = {tau} outside the cell [0, {2.0 * kin.tau_max}]")
    if tau < kin.tau_max:
        s, cavity = tau, 1
    else:
        s, cavity = 2.0 * kin.tau_max - tau, 2
    half = math.sinh(0.5 * a0 * s)
    x = 2.0 * half * half / a0
    t = math.sinh(a0 * s) / a0
    if cavity == 2:
        x = 1.0 - x
        t = kin.t_max - t
    return (min(max(t, 0.0), kin.t_max), min(max(x, 0.0), 1.0), cavity)


def mode_coupling(n: int, x_local: float, config: CellConfig) -> float:
    """Coupling amplitude of the probe to Dirichlet mode n at position x_local.

    Derived from the mode expansion of the cavity field,
    sqrt(2 hbar c^2 / (omega_n L)) sin(n pi x), with quadratures
    normalized so the vacuum covariance is the identity:
    g_n(x) = 2 lambda0 sin(n pi x) / sqrt(n pi).
    """
    if int(n) != n or not (1 <= n <= config.n_modes):
        raise ValueError(f"mode number {n} outside 1..{config.n_modes}")
    if not (0.0 <= x_local <= 1.0):
        raise ValueError(f"x_local = {x_local} outside the cavity [0, 1]")
    return 2.0 * config.lambda0 * math.sin(n * math.pi * x_local) / math.sqrt(n * math.pi)


def interaction_generator(tau: float, config: CellConfig) -> np.ndarray:
    """Quadratic-form matrix F(tau) of the interaction-picture Hamiltonian.

    H(tau) = (1/2) X^T F X on (probe, mode_1, ..., mode_N) quadratures.
    Both diagonal blocks vanish (free evolution is absorbed into the
    picture); the probe-mode blocks are outer products of the probe
    phase vector (cos(omega0 tau), sin(omega0 tau)) -- tau is global
    within the cell -- and each mode's phase vector
    (cos(n pi t), sin(n pi t)) at the per-cavity lab time, scaled by the
    coupling amplitude.
    """
    t_local, x_local, _ = trajectory(tau, config.a0)
    n = np.arange(1, config.n_modes + 1)
    omega_n = np.pi * n
    g = 2.0 * config.lambda0 * np.sin(omega_n * x_local) / np.sqrt(omega_n)
    w = np.empty(2 * config.n_modes)
    w[0::2] = g * np.cos(omega_n * t_local)
    w[1::2] = g * np.sin(omega_n * t_local)
    u = np.array([math.cos(config.omega0 * tau), math.sin(config.omega0 * tau)])
    dim = 2 * (config.n_modes + 1)
    f = np.zeros((dim, dim))
    f[:2, 2:] = np.outer(u, w)
    f[2:, :2] = f[:2, 2:].T
    return f


def _node_frames(config: CellConfig, cavity: int, kin: CellKinematics,
                 taus: np.ndarray):
    """Coupling data at an array of absolute proper times within one cavity.

    Returns (u, ju, w, jw, wnorm) with shapes (..., 2), (..., 2),
    (..., 2N), (..., 2N), (...).  u carries the global probe phase; w
    carries the per-cavity mode phases and coupling amplitudes.
    """
    a0 = config.a0
    s = taus if cavity == 1 else 2.0 * kin.tau_max - taus
    half = np.sinh(0.5 * a0 * s)
    x = 2.0 * half * half / a0
    t = np.sinh(a0 * s) / a0
    if cavity == 2:
        x = 1.0 - x
        t = kin.t_max - t
    np.clip(x, 0.0, 1.0, out=x)
    np.clip(t, 0.0, kin.t_max, out=t)

    omega_n = np.pi * np.arange(1, config.n_modes + 1)
    amp = 2.0 * config.lambda0 / np.sqrt(omega_n)
    g = amp * np.sin(x[..., None] * omega_n)
    phase = t[..., None] * omega_n
    w = np.empty(taus.shape + (2 * config.n_modes,))
    w[..., 0::2] = g * np.cos(phase)
    w[..., 1::2] = g * np.sin(phase)
    jw = np.empty_like(w)
    jw[..., 0::2] = w[..., 1::2]
    jw[..., 1::2] = -w[..., 0::2]

    pu = config.omega0 * taus
    u = np.stack([np.cos(pu), np.sin(pu)], axis=-1)
    ju = np.stack([u[..., 1], -u[..., 0]], axis=-1)
    wnorm = np.linalg.norm(w, axis=-1)
    return u, ju, w, jw, wnorm


def _series_terms(bound: float, tol: float = 1e-17) -> int:
    """Series length after which the dropped exp tail is below tol."""
    terms = 1
    tail = bound
    while tail > tol and terms < 12:
        terms += 1
        tail *= bound / terms
    return terms


def _propagate(config: CellConfig, cavity: int, n_steps: int) -> np.ndarray:
    """Time-ordered symplectic matrix of one cavity at fixed resolution.

    Product of per-step exponentials of the Magnus expansion of the
    interaction generator Omega F(tau).  Each sampled generator is
    nilpotent (F couples probe to field only), so every exponential is
    evaluated by a short exact series and every factor is exactly
    symplectic; the only discretization error is in the time ordering.

    method "gl4": fourth-order two-node Gauss-Legendre Magnus step,
    exp(h/2 (B1 + B2) + sqrt(3) h^2 / 12 [B2, B1]).
    method "midpoint": second-order single-node step, exp(h B_mid),
    which is exactly I + h B_mid.
    """
    kin = cell_kinematics(config.a0)
    h = kin.tau_max / n_steps
    tau_start = 0.0 if cavity == 1 else kin.tau_max
    dim = 2 * (config.n_modes + 1)
    s = np.eye(dim)

    gl4 = config.integrator.method == "gl4"
    offsets = np.array(_GL_NODES if gl4 else [0.5])
    gamma = math.sqrt(3.0) * h * h / 12.0
    hh = 0.5 * h if gl4 else h

    # Scratch buffers for the exponential series.
    term_a = np.empty_like(s)
    term_b = np.empty_like(s)
    pq = np.empty((2, dim))
    rbuf = np.empty((2, dim))
    ubuf = np.empty((2, dim))

    for start in range(0, n_steps, _CHUNK):
        count = min(_CHUNK, n_steps - start)
        k = np.arange(start, start + count)
        taus = tau_start + (k[:, None] + offsets) * h
        u, ju, w, jw, wnorm = _node_frames(config, cavity, kin, taus)

        for i in range(count):
            if gl4:
                uk, juk, wk, jwk = u[i], ju[i], w[i], jw[i]
                beta_w = wk[1] @ jwk[0]
                beta_u = uk[1] @ juk[0]
                gw = gamma * beta_w
                gu = gamma * beta_u
                bound = hh * (wnorm[i, 0] + wnorm[i, 1]) \
                    + 2.0 * abs(gw) + 2.0 * abs(gu) * wnorm[i, 0] * wnorm[i, 1]
                terms = _series_terms(bound)
                src = s
                out = term_a
                for j in range(1, terms + 1):
                    np.matmul(wk, src[2:], out=rbuf)
                    np.matmul(uk, src[:2], out=ubuf)
                    np.multiply(rbuf, hh, out=pq)
                    pq += gw * ubuf[::-1]
                    np.matmul(juk.T, pq, out=out[:2])
                    np.multiply(ubuf, hh, out=pq)
                    pq += gu * rbuf[::-1]
                    np.matmul(jwk.T, pq, out=out[2:])
                    if j > 1:
                        out *= 1.0 / j
                    s += out
                    src = out
                    out = term_b if src is term_a else term_a
            else:
                # Nilpotent midpoint factor: exp(h B) = I + h B exactly.
                uk, juk, wk, jwk = u[i, 0], ju[i, 0], w[i, 0], jw[i, 0]
                r1 = wk @ s[2:]
                s1 = uk @ s[:2]
                s[:2] += hh * np.outer(juk, r1)
                s[2:] += hh * np.outer(jwk, s1)
    return s


def _phase_floor(config: CellConfig, kin: CellKinematics) -> int:
    """Step count giving about one radian of the fastest phase per step."""
    swept = config.n_modes * math.pi * kin.t_max + config.omega0 * kin.tau_max
    return int(math.ceil(swept))


def integrate_cavity(cavity: int, config: CellConfig) -> np.ndarray:
    """Interaction-picture symplectic matrix of one full cavity crossing.

    Richardson step-doubling: the resolution is doubled until two
    successive results differ by less than richardson_tol in max-norm.
    Raises IntegratorNoConvergence when the doubling budget is exhausted
    or the result drifts off the symplectic group beyond SYMPLECTIC_TOL.
    """
    if cavity not in (1, 2):
        raise ValueError(f"cavity must be 1 or 2, got {cavity}")
    kin = cell_kinematics(config.a0)
    cfg = config.integrator
    n_steps = max(cfg.initial_steps, _phase_floor(config, kin))
    previous = _propagate(config, cavity, n_steps)
    for _ in range(cfg.max_doublings):
        n_steps *= 2
        current = _propagate(config, cavity, n_steps)
        if float(np.max(np.abs(current - previous))) < cfg.richardson_tol:
            deviation = symplectic_deviation(current)
            if deviation > SYMPLECTIC_TOL:
                raise IntegratorNoConvergence(
                    f"symplectic deviation {deviation:.3e} exceeds {SYMPLECTIC_TOL:.1e} "
                    f"at {n_steps} steps (cavity {cavity}, a0={config.a0})"
                )
            return current
        previous = current
    raise IntegratorNoConvergence(
        f"no convergence to {cfg.richardson_tol:.1e} within {cfg.max_doublings} "
        f"doublings from {max(cfg.initial_steps, _phase_floor(config, kin))} steps "
        f"(cavity {cavity}, a0={config.a0}, n_modes={config.n_modes})"
    )


@dataclass(frozen=True)
class CellBuild:
    """Everything produced while assembling one cell's channel."""

    kinematics: CellKinematics
    theta: float                    # free probe phase per cavity
    s_cavity1: np.ndarray
    s_cavity2: np.ndarray
    channel_cavity1: GaussianChannel
    channel_cavity2: GaussianChannel
    channel: GaussianChannel
    symplectic_deviation: float     # max over the two cavity matrices


def build_cell(config: CellConfig) -> CellBuild:
    """Integrate both cavities and compose the full cell channel.

    The cell map in the Schroedinger picture is the free rotation by
    2 Theta applied after the two interaction-picture cavity channels:
    T_cell = R(2 Theta) T2 T1,
    R_cell = R(2 Theta) (T2 R1 T2^T + R2) R(2 Theta)^T.
    Cavity 2's probe phases continue from tau_max, which is what makes
    this composition exact.
    """
    kin = cell_kinematics(config.a0)
    s1 = integrate_cavity(1, config)
    s2 = integrate_cavity(2, config)
    ch1 = reduce_channel(s1)
    ch2 = reduce_channel(s2)
    theta = kin.probe_phase(config.omega0)
    cell = compose_channels(rotation_channel(2.0 * theta),
                            compose_channels(ch2, ch1))
    deviation = max(symplectic_deviation(s1), symplectic_deviation(s2))
    return CellBuild(kin, theta, s1, s2, ch1, ch2, cell, deviation)


def cell_channel(config: CellConfig) -> GaussianChannel:
    """Gaussian channel of one full cell (two cavities plus rotation)."""
    return build_cell(config).channel
