"""Thresholded supports, graph edit distance between supports, and error norms."""
import math
from dataclasses import dataclass

import numpy as np

from reachged._backend import kernels
from reachged.linalg import ShapeError, as_matrix, entrywise_l1, frobenius_norm


@dataclass(frozen=True)
class Thresholds:
    """Decision threshold ``tau`` on two-hop strengths and demand threshold ``tau_F``.

    ``tau_F`` defaults to ``tau / 2``.
    """

    tau: float = 0.1
    tau_F: float = None

    def __post_init__(self):
        if self.tau_F is None:
            object.__setattr__(self, "tau_F", self.tau / 2)
        if not self.tau > 0 or not self.tau_F > 0:
            raise ValueError(f"thresholds must be positive, got tau={self.tau}, tau_F={self.tau_F}")

    @property
    def gap(self):
        return min(self.tau, self.tau_F)


@dataclass(frozen=True)
class GEDBreakdown:
    misses: int
    extras: int
    demand_edges: int
    predicted_edges: int

    @property
    def total(self):
        return self.misses + self.extras

    @property
    def recall(self):
        if self.demand_edges == 0:
            return 1.0
        return 1.0 - self.misses / self.demand_edges

    @property
    def precision(self):
        """Fraction of predicted edges that are demanded; 1 when nothing is predicted."""
        if self.predicted_edges == 0:
            return 1.0
        return 1.0 - self.extras / self.predicted_edges


def threshold_support(M, t):
    """Boolean support ``|M| >= t`` (ties count as present)."""
    if not t > 0:
        raise ValueError("threshold must be positive")
    return np.abs(as_matrix(M)) >= t


def _as_support(S):
    S = np.asarray(S)
    if S.ndim != 2:
        raise ShapeError("support must be 2-D")
    return S.astype(bool)


def ged_tau(S, B):
    """Split the Hamming distance between demand support ``S`` and two-hop support ``B``."""
    S = _as_support(S)
    B = _as_support(B)
    if S.shape != B.shape:
        raise ShapeError(f"support shapes differ: {S.shape} vs {B.shape}")
    return GEDBreakdown(
        misses=int(np.count_nonzero(S & ~B)),
        extras=int(np.count_nonzero(B & ~S)),
        demand_edges=int(np.count_nonzero(S)),
        predicted_edges=int(np.count_nonzero(B)),
    )


def ged_between(A, F, thresholds):
    """GED of the thresholded supports of ``A`` and ``F`` in one fused pass."""
    A = as_matrix(A)
    F = as_matrix(F)
    if A.shape != F.shape:
        raise ShapeError(f"shape mismatch {A.shape} vs {F.shape}")
    misses, extras, demand, reached, _ = kernels.ged_counts(A, F, thresholds.tau, thresholds.tau_F)
    return GEDBreakdown(misses, extras, demand, reached)


def weighted_edge_cost(b, costs):
    return costs.c_minus * b.misses + costs.c_plus * b.extras


@dataclass(frozen=True)
class ErrorNorms:
    frobenius: float
    l1: float
    abs_frobenius: float


def error_norms(A, F):
    """``||A-F||_F``, ``||A-F||_1`` and the sign-blind ``|| |A|-|F| ||_F``."""
    A = as_matrix(A)
    F = as_matrix(F)
    if A.shape != F.shape:
        raise ShapeError(f"shape mismatch {A.shape} vs {F.shape}")
    diff = A - F
    return ErrorNorms(
        frobenius=frobenius_norm(diff),
        l1=entrywise_l1(diff),
        abs_frobenius=frobenius_norm(np.abs(A) - np.abs(F)),
    )


def squared_error(A, F):
    d = np.ravel(as_matrix(A) - as_matrix(F))
    return math.fsum((d * d).tolist())
