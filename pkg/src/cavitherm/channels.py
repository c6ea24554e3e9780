"""Single-mode Gaussian channels and their asymptotic (fixed-point) analysis.

A channel acts on 2x2 covariance matrices as sigma -> T sigma T^T + R.
Repeated application of one cell's channel drives the probe toward the
unique fixed point whenever the map is a strict contraction; the linear
part of the map in vectorized form is the Kronecker square T (x) T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoUniqueFixedPoint
from .phase_space import devectorize, real_matrix_log, rotation_matrix, vectorize

# Unique-fixed-point guard: spectral radius of T (x) T must stay below 1 by
# at least this margin.
CONTRACTION_MARGIN = 1e-12


@dataclass(frozen=True)
class GaussianChannel:
    """Affine Gaussian map sigma -> T sigma T^T + R on one (q, p) mode."""

    t_matrix: np.ndarray
    r_matrix: np.ndarray

    def __post_init__(self):
        t = np.array(self.t_matrix, dtype=float)
        r = np.array(self.r_matrix, dtype=float)
        if t.shape != (2, 2) or r.shape != (2, 2):
            raise ValueError(f"expected 2x2 blocks, got {t.shape} and {r.shape}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(r))):
            raise ValueError("channel blocks contain non-finite entries")
        object.__setattr__(self, "t_matrix", t)
        object.__setattr__(self, "r_matrix", 0.5 * (r + r.T))


def reduce_channel(s: np.ndarray) -> GaussianChannel:
    """Trace the field modes (in vacuum) out of a joint symplectic matrix.

    For S acting on (probe, field) with the field initially in vacuum
    (covariance = identity), the reduced probe map has
    T = probe-probe block of S and R = S_pf S_pf^T built from the
    probe-field block.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 4 or s.shape[0] % 2:
        raise ValueError(f"expected joint symplectic matrix, got shape {s.shape}")
    t = s[:2, :2]
    coupling = s[:2, 2:]
    return GaussianChannel(t, coupling @ coupling.T)


def rotation_channel(theta: float) -> GaussianChannel:
    """Noiseless free rotation by angle theta."""
    return GaussianChannel(rotation_matrix(theta), np.zeros((2, 2)))


def compose_channels(outer: GaussianChannel, inner: GaussianChannel) -> GaussianChannel:
    """Composite map outer(inner(sigma))."""
    t = outer.t_matrix @ inner.t_matrix
    r = outer.t_matrix @ inner.r_matrix @ outer.t_matrix.T + outer.r_matrix
    return GaussianChannel(t, r)


def apply_channel(channel: GaussianChannel, sigma: np.ndarray) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (2, 2):
        raise ValueError(f"expected a 2x2 covariance matrix, got {sigma.shape}")
    out = channel.t_matrix @ sigma @ channel.t_matrix.T + channel.r_matrix
    return 0.5 * (out + out.T)


def affine_cell_matrix(channel: GaussianChannel) -> np.ndarray:
    """5x5 matrix acting on (1, vec sigma): [[1, 0], [vec R, T (x) T]]."""
    m = np.zeros((5, 5))
    m[0, 0] = 1.0
    m[1:, 0] = vectorize(channel.r_matrix)
    m[1:, 1:] = np.kron(channel.t_matrix, channel.t_matrix)
    return m


def linear_spectral_radius(channel: GaussianChannel) -> float:
    """Spectral radius of the linear part T (x) T of the covariance map."""
    return float(np.max(np.abs(np.linalg.eigvals(channel.t_matrix))) ** 2)


def convergence_spectrum(channel: GaussianChannel) -> np.ndarray:
    """Eigenvalues of the 5x5 affine cell matrix, sorted by |.| descending.

    For a strict contraction exactly one eigenvalue equals 1 (the affine
    direction); the rest lie strictly inside the unit disk and set the
    relaxation rate toward the fixed point.
    """
    eigs = np.linalg.eigvals(affine_cell_matrix(channel))
    return eigs[np.argsort(-np.abs(eigs))]


def fixed_point(channel: GaussianChannel, residual_tol: float = 1e-10) -> np.ndarray:
    """Unique fixed covariance of the channel, by direct linear solve.

    Solves (I - T (x) T) vec(sigma) = vec(R).  Raises NoUniqueFixedPoint
    when the linear part is not a strict contraction (spectral radius of
    T (x) T within CONTRACTION_MARGIN of 1 or above).
    """
    radius = linear_spectral_radius(channel)
    if radius >= 1.0 - CONTRACTION_MARGIN:
        raise NoUniqueFixedPoint(
            f"spectral radius of T(x)T is {radius:.15g}; the cell map is not "
            "a strict contraction"
        )
    k = np.kron(channel.t_matrix, channel.t_matrix)
    sigma = devectorize(np.linalg.solve(np.eye(4) - k, vectorize(channel.r_matrix)))
    sigma = 0.5 * (sigma + sigma.T)
    residual = np.max(np.abs(apply_channel(channel, sigma) - sigma))
    if residual > residual_tol * max(1.0, float(np.max(np.abs(sigma)))):
        raise NoUniqueFixedPoint(
            f"fixed-point residual {residual:.3e} exceeds {residual_tol:.1e}; "
            "the solve is not trustworthy"
        )
    return sigma


def fixed_point_from_spectrum(channel: GaussianChannel) -> np.ndarray:
    """Fixed point recovered from the unit eigenvector of the 5x5 matrix.

    Cross-validation route for :func:`fixed_point`; the eigenvector for
    eigenvalue 1, normalized to first component 1, devectorizes to the
    fixed covariance.
    """
    radius = linear_spectral_radius(channel)
    if radius >= 1.0 - CONTRACTION_MARGIN:
        raise NoUniqueFixedPoint(
            f"spectral radius of T(x)T is {radius:.15g}; no isolated unit eigenvalue"
        )
    eigvals, eigvecs = np.linalg.eig(affine_cell_matrix(channel))
    idx = int(np.argmin(np.abs(eigvals - 1.0)))
    vec = eigvecs[:, idx]
    if abs(vec[0]) < 1e-12:
        raise NoUniqueFixedPoint("unit eigenvector has no affine component")
    vec = (vec / vec[0]).real
    sigma = devectorize(vec[1:])
    return 0.5 * (sigma + sigma.T)


@dataclass(frozen=True)
class IcmGenerator:
    """Continuous interpolation of the discrete cell map.

    Generates the flow d sigma / dt = drift sigma + sigma drift^T + noise
    whose time-delta_t stroboscopic map reproduces the discrete channel
    exactly: sigma(n * delta_t) equals n applications of the channel.
    """

    drift: np.ndarray
    noise: np.ndarray
    delta_t: float

    def __post_init__(self):
        object.__setattr__(self, "drift", np.array(self.drift, dtype=float))
        object.__setattr__(self, "noise", np.array(self.noise, dtype=float))


def icm_generator(channel: GaussianChannel, delta_t: float) -> IcmGenerator:
    """Time-independent generator matching the channel at multiples of delta_t.

    drift = log(T) / delta_t via the principal real logarithm.  The noise
    solves integral_0^delta_t e^{G s} ds vec(noise) = vec(R) with
    G = drift (x) I + I (x) drift, i.e. vec(noise) = G (T(x)T - I)^{-1} vec(R)
    (the Kronecker-sum form of log(T (x) T) / delta_t, which keeps the
    interpolation exact even when log(T(x)T) falls on a non-principal
    branch).  Raises LogBranchError when T has an eigenvalue on the
    closed negative real axis.
    """
    if delta_t <= 0.0:
        raise ValueError(f"delta_t must be positive, got {delta_t}")
    drift = real_matrix_log(channel.t_matrix) / delta_t
    g = np.kron(drift, np.eye(2)) + np.kron(np.eye(2), drift)
    k = np.kron(channel.t_matrix, channel.t_matrix)
    noise_vec = g @ np.linalg.solve(k - np.eye(4), vectorize(channel.r_matrix))
    noise = devectorize(noise_vec)
    return IcmGenerator(drift, 0.5 * (noise + noise.T), delta_t)


def icm_evolve(generator: IcmGenerator, sigma: np.ndarray, t: float) -> np.ndarray:
    """Exact flow of the interpolating generator from sigma over time t."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (2, 2):
        raise ValueError(f"expected a 2x2 covariance matrix, got {sigma.shape}")
    g = np.kron(generator.drift, np.eye(2)) + np.kron(np.eye(2), generator.drift)
    flow = np.zeros((5, 5))
    flow[1:, 0] = vectorize(generator.noise)
    flow[1:, 1:] = g
    state = np.concatenate(([1.0], vectorize(sigma)))
    out = devectorize((scipy.linalg.expm(flow * t) @ state)[1:])
    return 0.5 * (out + out.T)
