"""Dense real-matrix primitives: products, entrywise norms, extreme singular values.

Matrices are plain ``float64`` numpy arrays. :func:`as_matrix` is the single
gate: it copies into a read-only C-contiguous 2-D array and rejects NaN/Inf.
"""
import math

import numpy as np

from reachged._backend import kernels

__all__ = [
    "ShapeError",
    "NumericalError",
    "as_matrix",
    "matmul",
    "frobenius_norm",
    "entrywise_l1",
    "frobenius_inner",
    "singular_values",
    "operator_norm",
    "sigma_min",
]

POWER_MAX_ITER = 10_000


class ShapeError(ValueError):
    """Operands have incompatible dimensions."""


class NumericalError(ArithmeticError):
    """An iterative routine did not converge."""

    def __init__(self, message, iterations):
        super().__init__(f"{message} after {iterations} iterations")
        self.iterations = iterations


def as_matrix(M):
    """Validate and freeze ``M`` as a finite 2-D float64 array."""
    arr = np.array(M, dtype=np.float64, order="C", ndmin=2)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {arr.ndim} dimensions")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"matrix must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    arr.setflags(write=False)
    return arr


def matmul(D, E):
    """Return ``A = D @ E`` with each entry summed left to right in compensated arithmetic."""
    D = as_matrix(D)
    E = as_matrix(E)
    if D.shape[1] != E.shape[0]:
        raise ShapeError(f"cannot multiply {D.shape} by {E.shape}")
    A = kernels.kahan_matmul(D, E)
    A.setflags(write=False)
    return A


def _fsum(values):
    return math.fsum(np.ravel(values).tolist())


def _unit_exponent(M):
    """Exponent ``e`` with ``max |M| * 2**-e`` in ``[0.5, 1)``; squares then neither overflow nor underflow."""
    m = float(np.max(np.abs(M)))
    return math.frexp(m)[1] if m > 0 else 0


def frobenius_norm(M):
    M = as_matrix(M)
    e = _unit_exponent(M)
    S = np.ldexp(M, -e)
    return math.ldexp(math.sqrt(_fsum(S * S)), e)


def entrywise_l1(M):
    return _fsum(np.abs(as_matrix(M)))


def frobenius_inner(X, Y):
    """``<X, Y>_F = Tr(X^T Y)``."""
    X = as_matrix(X)
    Y = as_matrix(Y)
    if X.shape != Y.shape:
        raise ShapeError(f"shape mismatch {X.shape} vs {Y.shape}")
    ex, ey = _unit_exponent(X), _unit_exponent(Y)
    return math.ldexp(_fsum(np.ldexp(X, -ex) * np.ldexp(Y, -ey)), ex + ey)


def singular_values(M, max_sweeps=80):
    """All ``min(rows, cols)`` singular values, descending, by one-sided Jacobi."""
    M = as_matrix(M)
    e = _unit_exponent(M)
    # orthogonality target scales with the column length: rounding in the dot products is ~m eps
    tol = max(M.shape) * np.finfo(np.float64).eps
    values, sweeps = kernels.jacobi_singular_values(np.ldexp(M, -e), tol, max_sweeps)
    if sweeps < 0:
        raise NumericalError("one-sided Jacobi did not converge", max_sweeps)
    return np.ldexp(values, e)


def _start_vector(n):
    # fixed, generic start: Philox-derived so it is never orthogonal to a structured subspace by design
    v = kernels.spike_slab(1, n, 1.0, 1.0, 0.0, 0x5EED5EED, 0xFFFF, 0)[0]
    return v / np.linalg.norm(v)


def operator_norm(M, tol=1e-10, method="lanczos"):
    """Largest singular value of ``M``.

    ``method="lanczos"`` (default) runs Lanczos with full reorthogonalization
    on the smaller Gram matrix ``G`` and stops once the top Ritz pair has
    residual ``<= tol * theta``. It spans all of ``G``'s range within
    ``dim G`` steps, so clustered top singular values cannot stall it.
    ``method="power"`` is plain power iteration with the same residual test;
    it can exhaust its iteration cap when the top two singular values nearly
    coincide. ``method="jacobi"`` reads it off the full decomposition.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = as_matrix(M)
    if method == "jacobi":
        return float(singular_values(M)[0])
    if method not in ("lanczos", "power"):
        raise ValueError(f"unknown method {method!r}")
    if not np.any(M):
        return 0.0
    e = _unit_exponent(M)
    M = np.ldexp(M, -e)
    G = M.T @ M if M.shape[1] <= M.shape[0] else M @ M.T
    lam = _lanczos_top(G, tol) if method == "lanczos" else _power_top(G, tol)
    return math.ldexp(math.sqrt(max(lam, 0.0)), e)


def _power_top(G, tol):
    v = _start_vector(G.shape[0])
    restarts = 0
    for _ in range(POWER_MAX_ITER):
        w = G @ v
        lam = float(v @ w)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # start landed in the null space; restart from a shifted vector
            restarts += 1
            v = np.roll(_start_vector(G.shape[0]), restarts) + 1.0 / G.shape[0]
            v /= np.linalg.norm(v)
            continue
        if np.linalg.norm(w - lam * v) <= tol * lam:
            return lam
        v = w / nw
    raise NumericalError("power iteration did not converge", POWER_MAX_ITER)


def _lanczos_top(G, tol):
    n = G.shape[0]
    scale = float(np.linalg.norm(G, 1))
    Q = np.zeros((n, n))
    alpha = np.zeros(n)
    beta = np.zeros(n)
    q = _start_vector(n)
    fresh = 0
    for k in range(n):
        Q[:, k] = q
        w = G @ q
        alpha[k] = float(q @ w)
        # two passes of classical Gram-Schmidt keep the basis orthogonal to working precision
        for _ in range(2):
            w -= Q[:, :k + 1] @ (Q[:, :k + 1].T @ w)
        T = np.diag(alpha[:k + 1]) + np.diag(beta[:k], 1) + np.diag(beta[:k], -1)
        theta, S = np.linalg.eigh(T)
        b = float(np.linalg.norm(w))
        if k + 1 == n or (b > 1e-14 * scale and b * abs(S[-1, -1]) <= tol * theta[-1]):
            return float(theta[-1])
        if b <= 1e-14 * scale:
            # invariant subspace: continue from a fresh direction orthogonal to it
            fresh += 1
            w = np.roll(_start_vector(n), fresh)
            for _ in range(2):
                w -= Q[:, :k + 1] @ (Q[:, :k + 1].T @ w)
            b_new = float(np.linalg.norm(w))
            beta[k] = 0.0
            q = w / b_new
            continue
        beta[k] = b
        q = w / b
    raise NumericalError("Lanczos did not converge", n)


def sigma_min(M, tol=1e-10):
    """Smallest of the ``min(rows, cols)`` singular values of ``M``.

    Jacobi delivers absolute accuracy near machine precision times
    ``sigma_max``, well inside ``tol * sigma_max``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    return float(singular_values(M)[-1])
