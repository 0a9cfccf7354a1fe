"""Dense linear-algebra kernels and the seeded RNG contract.

Everything here is a pure function of its inputs.  Randomized routines take
an explicit integer seed and are bit-deterministic for a fixed seed: streams
come from the counter-based Philox generator, and Gaussian variates are
produced by applying the inverse normal CDF to uniform draws so that the
stream position fully determines every variate.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .exceptions import ConvergenceError, NotPositiveDefiniteError

_MASK64 = (1 << 64) - 1


def stream(seed, tag=0):
    """Independent Philox stream keyed by (seed, tag).

    Distinct tags give statistically independent streams for the same seed,
    which lets one logical seed drive several draws (edges, signal nodes,
    design matrix, noise) without any cross-talk.
    """
    key = np.array([int(seed) & _MASK64, int(tag) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def standard_normal(gen, shape):
    """Standard normal variates via inverse-CDF on open-interval uniforms."""
    u = gen.integers(1, 1 << 53, size=shape).astype(np.float64) / float(1 << 53)
    return ndtri(u)


@dataclass(frozen=True)
class SpectralEstimate:
    """Largest eigenvalue estimate from power iteration.

    ``residual`` is the accuracy measure that satisfied the stopping rule:
    the Rayleigh-quotient residual, or the geometric remainder bound on the
    value when the spectrum's top is too clustered for the residual to
    converge.  Either way it bounds the value error on success.
    """

    value: float
    iterations: int
    residual: float


def spectral_norm_sym(mat, tol=1e-10, max_iter=10_000, seed=0):
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Deterministic for a fixed seed.  Iteration stops when either the
    Rayleigh-quotient residual ``||Mv - lam v||`` falls below ``tol * lam``,
    or the geometric remainder of the (monotone) Rayleigh sequence does:
    for clustered top eigenvalues the residual decays too slowly to be a
    usable test, but the value error is bounded by extrapolating the
    increments ``lam_k - lam_{k-1}``, whose ratio estimates the
    convergence factor.

    Raises ConvergenceError (carrying the last estimate) if neither test
    passes within ``max_iter`` iterations.
    """
    mat = np.asarray(mat, dtype=np.float64)
    n = mat.shape[0]
    if n == 0:
        return SpectralEstimate(0.0, 0, 0.0)
    v = standard_normal(stream(seed, tag=7), n)
    v /= np.linalg.norm(v)
    lam = 0.0
    prev_gain = np.inf
    for it in range(1, max_iter + 1):
        w = mat @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            # v is in the kernel; for a PSD matrix started at a random
            # vector this means the matrix is (numerically) zero.
            return SpectralEstimate(0.0, it, 0.0)
        v = w / norm_w
        mv = mat @ v
        lam_new = float(v @ mv)
        residual = float(np.linalg.norm(mv - lam_new * v))
        scale = max(abs(lam_new), np.finfo(float).tiny)
        if residual <= tol * scale:
            return SpectralEstimate(max(lam_new, 0.0), it, residual)
        gain = lam_new - lam
        if it >= 3 and 0.0 <= gain < prev_gain:
            ratio = gain / prev_gain
            remainder = gain * ratio / (1.0 - ratio)
            if remainder <= tol * scale:
                return SpectralEstimate(max(lam_new + remainder, 0.0), it, remainder)
        if gain == 0.0 and it >= 3:
            return SpectralEstimate(max(lam_new, 0.0), it, 0.0)
        prev_gain = gain if gain > 0 else prev_gain
        lam = lam_new
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations "
        f"(residual {residual:.3e})",
        estimate=SpectralEstimate(max(lam, 0.0), max_iter, residual),
    )


def extreme_eigs_sym(mat, tol=1e-10, max_iter=10_000, seed=0):
    """(smallest, largest) eigenvalue of a symmetric matrix.

    Computed through a full symmetric eigendecomposition: the matrices this
    package calibrates (banded and other structured precision patterns)
    have tightly clustered extreme eigenvalues, for which shifted power
    iteration needs far more than any reasonable iteration budget to reach
    ``tol``.  The (tol, max_iter, seed) parameters are kept for interface
    stability; LAPACK delivers machine precision deterministically.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if mat.size == 0:
        raise ValueError("matrix is empty")
    evals = np.linalg.eigvalsh(mat)
    return float(evals[0]), float(evals[-1])


def cholesky(mat):
    """Lower-triangular factor L with ``mat = L @ L.T``.

    Raises NotPositiveDefiniteError naming the failing pivot index when a
    diagonal pivot is not strictly positive.
    """
    a = np.asarray(mat, dtype=np.float64)
    p = a.shape[0]
    lower = np.zeros_like(a)
    for j in range(p):
        pivot = a[j, j] - lower[j, :j] @ lower[j, :j]
        if pivot <= 0.0 or not np.isfinite(pivot):
            raise NotPositiveDefiniteError(j, pivot)
        ljj = np.sqrt(pivot)
        lower[j, j] = ljj
        if j + 1 < p:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / ljj
    return lower


def solve_lower(lower, b):
    """Solve ``lower @ x = b`` by forward substitution (vector or matrix b)."""
    p = lower.shape[0]
    x = np.array(b, dtype=np.float64, copy=True)
    for i in range(p):
        if i:
            x[i] = x[i] - lower[i, :i] @ x[:i]
        x[i] = x[i] / lower[i, i]
    return x


def solve_upper(upper, b):
    """Solve ``upper @ x = b`` by back substitution (vector or matrix b)."""
    p = upper.shape[0]
    x = np.array(b, dtype=np.float64, copy=True)
    for i in range(p - 1, -1, -1):
        if i + 1 < p:
            x[i] = x[i] - upper[i, i + 1 :] @ x[i + 1 :]
        x[i] = x[i] / upper[i, i]
    return x


def solve_spd(mat, b):
    """Solve ``mat @ x = b`` for symmetric positive-definite ``mat``."""
    lower = cholesky(mat)
    return solve_upper(lower.T, solve_lower(lower, b))


def inv_spd(mat):
    """Inverse of a symmetric positive-definite matrix via its factor."""
    return solve_spd(mat, np.eye(np.asarray(mat).shape[0]))
