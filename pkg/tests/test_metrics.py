import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from reachged.linalg import ShapeError
from reachged.metrics import (
    GEDBreakdown,
    Thresholds,
    error_norms,
    ged_between,
    ged_tau,
    squared_error,
    threshold_support,
    weighted_edge_cost,
)
from reachged.theory import CostModel

shapes = st.tuples(st.integers(1, 8), st.integers(1, 8))


def test_tau_F_defaults_to_half_tau():
    assert Thresholds().tau_F == 0.05
    assert Thresholds(tau=0.2).tau_F == 0.1
    assert Thresholds(tau=0.2, tau_F=0.3).gap == 0.2


def test_thresholds_positive():
    with pytest.raises(ValueError):
        Thresholds(tau=0.0)
    with pytest.raises(ValueError):
        Thresholds(tau=0.1, tau_F=-1.0)


def test_ties_count_as_present():
    S = threshold_support(np.array([[0.1, -0.1, 0.0999999]]), 0.1)
    assert S.tolist() == [[True, True, False]]
    with pytest.raises(ValueError):
        threshold_support(np.eye(2), 0.0)


def test_ged_breakdown_example():
    S = np.array([[1, 1, 0], [0, 0, 1]], dtype=bool)
    B = np.array([[1, 0, 1], [0, 0, 0]], dtype=bool)
    b = ged_tau(S, B)
    assert (b.misses, b.extras, b.total) == (2, 1, 3)
    assert b.recall == pytest.approx(1 / 3)
    assert b.precision == pytest.approx(1 / 2)


def test_empty_supports():
    b = ged_tau(np.zeros((2, 2), bool), np.zeros((2, 2), bool))
    assert b.total == 0 and b.recall == 1.0 and b.precision == 1.0
    with pytest.raises(ShapeError):
        ged_tau(np.zeros((2, 2)), np.zeros((2, 3)))


@given(arrays(bool, shapes), st.data())
def test_ged_is_hamming_distance(S, data):
    B = data.draw(arrays(bool, S.shape))
    b = ged_tau(S, B)
    assert b.total == np.count_nonzero(S != B)
    assert ged_tau(S, S).total == 0
    swapped = ged_tau(B, S)
    assert (swapped.misses, swapped.extras) == (b.extras, b.misses)


@given(arrays(bool, shapes), st.data())
def test_ged_triangle(S, data):
    B = data.draw(arrays(bool, S.shape))
    C = data.draw(arrays(bool, S.shape))
    assert ged_tau(S, C).total <= ged_tau(S, B).total + ged_tau(B, C).total


@given(arrays(np.float64, shapes, elements=st.floats(-1, 1)), st.data())
def test_fused_kernel_matches_two_step(A, data):
    F = data.draw(arrays(np.float64, A.shape, elements=st.floats(-1, 1)))
    th = Thresholds(0.1)
    fused = ged_between(A, F, th)
    ref = ged_tau(threshold_support(F, th.tau_F), threshold_support(A, th.tau))
    assert fused == ref


def test_weighted_cost():
    b = GEDBreakdown(misses=3, extras=8, demand_edges=5, predicted_edges=10)
    assert weighted_edge_cost(b, CostModel()) == 3 * 10 + 8 * 0.25


@given(arrays(np.float64, shapes, elements=st.floats(-10, 10)), st.data())
def test_error_norms(A, data):
    F = data.draw(arrays(np.float64, A.shape, elements=st.floats(-10, 10)))
    n = error_norms(A, F)
    d = A - F
    # math.hypot rescales internally, so it survives the underflow a naive sum of squares hits
    assert n.frobenius == pytest.approx(math.hypot(*d.ravel()), rel=1e-12, abs=1e-300)
    assert n.l1 == pytest.approx(np.sum(np.abs(d)), rel=1e-12, abs=1e-300)
    # reverse triangle inequality entrywise
    assert n.abs_frobenius <= n.frobenius * (1 + 1e-12) + 1e-300
    if n.frobenius > 1e-150:
        assert squared_error(A, F) == pytest.approx(n.frobenius ** 2, rel=1e-12)
