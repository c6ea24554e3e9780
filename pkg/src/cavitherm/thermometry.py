"""Reading a temperature off the asymptotic probe state.

Any single-mode Gaussian state with zero mean decomposes as
sigma = R(theta) diag(nu e^r, nu e^-r) R(theta)^T: a thermal state of
symplectic eigenvalue nu, squeezed by r along an axis at angle theta.
The state is exactly thermal iff r = 0; the measures below quantify how
far from thermal it is, in energy and in spectroscopic terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GroundStateDivergence, PopulationInversion

# Below this squeezing the principal axis angle is numerically meaningless.
_R_TIE = 1e-14

# nu - 1 below this with nonzero squeezing makes the thermality measures blow up.
_NU_FLOOR = 1e-12


@dataclass(frozen=True)
class StandardForm:
    """Rotated thermal-squeezed decomposition of a 2x2 covariance matrix."""

    nu: float      # symplectic eigenvalue, sqrt(det sigma) >= 1
    r: float       # squeezing parameter, >= 0
    theta: float   # principal axis angle in [-pi/2, pi/2]; 0 when r ~ 0


def standard_form(sigma: np.ndarray) -> StandardForm:
    """Decompose sigma = R(theta) diag(nu e^r, nu e^-r) R(theta)^T.

    Rejects unphysical covariance matrices (det < 1 - 1e-10).  The major
    axis of the one-sigma ellipse is the eigenvector of the larger
    eigenvalue; theta is reported modulo pi in [-pi/2, pi/2] and set to
    exactly zero when r < 1e-14 (the decomposition is rotation-degenerate
    there).
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (2, 2):
        raise ValueError(f"expected a 2x2 covariance matrix, got {sigma.shape}")
    if np.max(np.abs(sigma - sigma.T)) > 1e-10 * max(1.0, float(np.max(np.abs(sigma)))):
        raise ValueError("covariance matrix is not symmetric")
    det = float(np.linalg.det(sigma))
    if det < 1.0 - 1e-10:
        raise ValueError(f"unphysical covariance matrix: det = {det} < 1")

    vals, vecs = np.linalg.eigh(0.5 * (sigma + sigma.T))
    lo, hi = float(vals[0]), float(vals[1])
    if lo <= 0.0:
        raise ValueError(f"covariance matrix is not positive definite: {vals}")
    nu = math.sqrt(lo * hi)
    r = 0.5 * math.log(hi / lo)
    if r < _R_TIE:
        theta = 0.0
    else:
        major = vecs[:, 1]
        # sigma = R(theta) D R(theta)^T puts the major axis at (cos, -sin)(theta)
        theta = math.atan2(-major[1], major[0])
        theta = (theta + 0.5 * math.pi) % math.pi - 0.5 * math.pi
    return StandardForm(nu, r, theta)


def reconstruct(form: StandardForm) -> np.ndarray:
    """Covariance matrix of a standard-form decomposition."""
    c, s = math.cos(form.theta), math.sin(form.theta)
    rot = np.array([[c, s], [-s, c]])
    return rot @ np.diag([form.nu * math.exp(form.r),
                          form.nu * math.exp(-form.r)]) @ rot.T


def temperature(nu: float, omega0: float) -> float:
    """Temperature of a thermal state with symplectic eigenvalue nu.

    T = omega0 / (2 arccoth(nu)), with arccoth(nu) = log1p(2/(nu-1))/2.
    Returns 0 at nu = 1 (ground state).  Values of nu below 1 by more
    than roundoff are rejected.
    """
    if omega0 <= 0.0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    if nu < 1.0 - 1e-10:
        raise ValueError(f"symplectic eigenvalue {nu} below 1")
    if nu <= 1.0:
        return 0.0
    return omega0 / math.log1p(2.0 / (nu - 1.0))


def squeezing_energy_ratio(nu: float, r: float) -> float:
    """Energy stored in squeezing relative to thermal excitation energy.

    delta = nu (cosh r - 1) / (nu - 1); for small r this is about
    nu r^2 / (2 (nu - 1)).  Exactly 0 at r = 0.  Diverges as the state
    approaches the ground state with squeezing present.
    """
    if r < 0.0 or nu < 1.0 - 1e-10:
        raise ValueError(f"invalid standard form nu={nu}, r={r}")
    if r == 0.0:
        return 0.0
    if nu - 1.0 < _NU_FLOOR:
        raise GroundStateDivergence(
            f"squeezing energy ratio diverges: nu - 1 = {nu - 1.0:.3e} with r = {r:.3e}"
        )
    return nu * (math.cosh(r) - 1.0) / (nu - 1.0)


def edr_temperature_spread(nu: float, r: float) -> float:
    """Relative spread of excited-state-ratio temperatures due to squeezing.

    epsilon = nu^2 r^2 / (2 (nu^2 - 1)^2 arccoth(nu)): the relative
    disagreement among temperatures inferred from different Fock-level
    pairs, to leading order in r.  Exactly 0 at r = 0.
    """
    if r < 0.0 or nu < 1.0 - 1e-10:
        raise ValueError(f"invalid standard form nu={nu}, r={r}")
    if r == 0.0:
        return 0.0
    if nu - 1.0 < _NU_FLOOR:
        raise GroundStateDivergence(
            f"temperature spread diverges: nu - 1 = {nu - 1.0:.3e} with r = {r:.3e}"
        )
    arccoth = 0.5 * math.log1p(2.0 / (nu - 1.0))
    return nu * nu * r * r / (2.0 * (nu * nu - 1.0) ** 2 * arccoth)


def fock_populations(nu: float, r: float) -> tuple[float, float, float]:
    """Populations of the lowest three number states of a Gaussian state.

    Closed forms in the covariance eigenvalues l1 = nu e^r, l2 = nu e^-r:

    p0 = 2 / sqrt((1+l1)(1+l2))
    p1 = 2 (l1 l2 - 1) / ((1+l1)(1+l2))^(3/2)
    p2 = (2 + l1^2 + l2^2 - 6 l1 l2 + 2 l1^2 l2^2) / ((1+l1)(1+l2))^(5/2)

    All lie in [0, 1]; tiny negative roundoff is clamped to zero.
    """
    if r < 0.0 or nu < 1.0 - 1e-10:
        raise ValueError(f"invalid standard form nu={nu}, r={r}")
    l1 = nu * math.exp(r)
    l2 = nu * math.exp(-r)
    base = (1.0 + l1) * (1.0 + l2)
    p0 = 2.0 / math.sqrt(base)
    p1 = 2.0 * (l1 * l2 - 1.0) / base ** 1.5
    p2 = (2.0 + l1 * l1 + l2 * l2 - 6.0 * l1 * l2 + 2.0 * (l1 * l2) ** 2) / base ** 2.5
    clamp = lambda p: 0.0 if -1e-12 < p < 0.0 else p
    p0, p1, p2 = clamp(p0), clamp(p1), clamp(p2)
    for p in (p0, p1, p2):
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"population {p} outside [0, 1] (nu={nu}, r={r})")
    return p0, p1, p2


def edr_temperature(p_n: float, p_m: float, n: int, m: int, omega0: float) -> float:
    """Temperature inferred from the population ratio of levels n < m.

    T = (m - n) omega0 / log(p_n / p_m).  For a thermal state this is
    independent of the pair (n, m); the spread across pairs measures
    non-thermality.  Raises PopulationInversion when p_m >= p_n (no
    positive temperature reproduces the ratio).  Returns 0 when p_m
    underflows to zero (ground-state limit).
    """
    if m <= n or n < 0:
        raise ValueError(f"need level indices m > n >= 0, got n={n}, m={m}")
    if omega0 <= 0.0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    if p_n <= 0.0:
        raise ValueError(f"reference population p_{n} = {p_n} is not positive")
    if p_m >= p_n:
        raise PopulationInversion(
            f"p_{m} = {p_m} >= p_{n} = {p_n}: no positive-temperature ratio"
        )
    if p_m <= 0.0:
        return 0.0
    return (m - n) * omega0 / math.log(p_n / p_m)


@dataclass(frozen=True)
class ThermalityReport:
    """Temperature and how-thermal-is-it diagnostics of a probe state."""

    t0: float
    delta: float        # squeezing energy ratio
    epsilon: float      # predicted relative EDR spread
    p0: float
    p1: float
    p2: float
    t_edr_01: float
    t_edr_02: float
    t_edr_12: float


def thermality_report(form: StandardForm, omega0: float) -> ThermalityReport:
    """All thermality diagnostics of a state in standard form."""
    t0 = temperature(form.nu, omega0)
    delta = squeezing_energy_ratio(form.nu, form.r)
    epsilon = edr_temperature_spread(form.nu, form.r)
    p0, p1, p2 = fock_populations(form.nu, form.r)
    t01 = edr_temperature(p0, p1, 0, 1, omega0)
    t02 = edr_temperature(p0, p2, 0, 2, omega0)
    t12 = edr_temperature(p1, p2, 1, 2, omega0) if p1 > 0.0 else 0.0
    return ThermalityReport(t0, delta, epsilon, p0, p1, p2, t01, t02, t12)
