"""Phase-space primitives for Gaussian states on (q, p) quadratures.

Conventions used throughout the package:

* Quadrature ordering is (q_0, p_0, q_1, p_1, ...), probe first.
* Covariance matrices are normalized so the vacuum is the identity,
  i.e. sigma_ij = <{X_i - <X_i>, X_j - <X_j>}> with the anticommutator.
* The symplectic form is block diagonal in 2x2 blocks [[0, 1], [-1, 0]].
* Vectorization of 2x2 matrices is row-major, so that
  vec(A B C^T) = (A (x) C) vec(B) with numpy's kron.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import LogBranchError

_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Symplectic form for `n_modes` (q, p) pairs as a 2n x 2n array."""
    if n_modes < 1:
        raise ValueError(f"need at least one mode, got {n_modes}")
    return np.kron(np.eye(n_modes), _J2)


def rotation_matrix(theta: float) -> np.ndarray:
    """Phase-space rotation by angle theta.

    Sign convention: R(theta) = [[cos, sin], [-sin, cos]], so that free
    evolution of (q, p) at rate omega0 over time tau is R(omega0 * tau),
    matching q(tau) = q(0) cos(omega0 tau) + p(0) sin(omega0 tau).
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def vectorize(sigma: np.ndarray) -> np.ndarray:
    """Row-major vectorization of a square matrix."""
    sigma = np.asarray(sigma)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {sigma.shape}")
    return sigma.reshape(-1).copy()

def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize` for 2x2 matrices (length-4 vectors)."""
    v = np.asarray(v)
    if v.shape != (4,):
        raise ValueError(f"expected a length-4 vector, got shape {v.shape}")
    return v.reshape(2, 2).copy()


def symplectic_deviation(s: np.ndarray) -> float:
    """Max-norm deviation of S Omega S^T from Omega.

    Returns the deviation; callers compare against their own tolerance.
    """
    s = np.asarray(s)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        raise ValueError(f"expected an even-dimensional square matrix, got {s.shape}")
    omega = symplectic_form(s.shape[0] // 2)
    return float(np.max(np.abs(s @ omega @ s.T - omega)))


def covariance_deviation(sigma: np.ndarray) -> float:
    """How far sigma is from being a physical covariance matrix.

    Returns max(asymmetry, violation of sigma + i Omega >= 0); zero or a
    small roundoff-scale number for physical states.  For 2x2 input the
    positivity part reduces to 1 - det(sigma) when det < 1.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise ValueError(f"expected an even-dimensional square matrix, got {sigma.shape}")
    asym = float(np.max(np.abs(sigma - sigma.T)))
    omega = symplectic_form(sigma.shape[0] // 2)
    eigs = np.linalg.eigvalsh(sigma + 1j * omega)
    positivity = float(max(0.0, -eigs.min()))
    return max(asym, positivity)


def real_matrix_log(m: np.ndarray, roundtrip_tol: float = 1e-10) -> np.ndarray:
    """Principal real logarithm of a real square matrix.

    Exists iff the matrix is nonsingular and each Jordan block for a
    negative real eigenvalue appears an even number of times; this
    implementation rejects any eigenvalue on the closed negative real
    axis, which is the boundary at which a one-parameter real
    interpolation ceases to exist.

    Computed by real Schur decomposition with inverse scaling and
    squaring on the quasi-triangular factor (scipy's logm).  The result
    is validated by the round-trip expm(log(M)) ~ M in max-norm.

    Raises LogBranchError when no trustworthy real logarithm exists.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")

    eigs = np.linalg.eigvals(m)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    on_negative_axis = (np.abs(eigs.imag) <= 1e-12 * scale) & (eigs.real <= 0.0)
    if np.any(on_negative_axis):
        bad = eigs[on_negative_axis]
        raise LogBranchError(
            f"eigenvalue(s) {bad} lie on the closed negative real axis; "
            "no principal real logarithm"
        )

    log_m = scipy.linalg.logm(m)
    if np.max(np.abs(log_m.imag)) > 1e-12 * max(1.0, np.max(np.abs(log_m.real))):
        raise LogBranchError("logarithm has a non-negligible imaginary part")
    log_m = log_m.real

    roundtrip = np.max(np.abs(scipy.linalg.expm(log_m) - m))
    if roundtrip > roundtrip_tol * scale:
        raise LogBranchError(
            f"round-trip error {roundtrip:.3e} exceeds tolerance {roundtrip_tol:.1e}"
        )
    return log_m
