"""Typical-case theory of thresholded graph-edit-distance reachability for
two-hop linearly decomposable distributed computing."""
from reachged._backend import BACKEND
from reachged.ensemble import EnsembleParams, SeedSpec, sample_instance, sample_spike_slab
from reachged.linalg import (
    NumericalError,
    ShapeError,
    frobenius_norm,
    matmul,
    operator_norm,
    sigma_min,
    singular_values,
)
from reachged.metrics import GEDBreakdown, Thresholds, ged_between, ged_tau, threshold_support
from reachged.theory import CostModel, Infeasible, is_feasible

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CostModel",
    "EnsembleParams",
    "GEDBreakdown",
    "Infeasible",
    "NumericalError",
    "SeedSpec",
    "ShapeError",
    "Thresholds",
    "frobenius_norm",
    "ged_between",
    "ged_tau",
    "is_feasible",
    "matmul",
    "operator_norm",
    "sample_instance",
    "sample_spike_slab",
    "sigma_min",
    "singular_values",
    "threshold_support",
]
