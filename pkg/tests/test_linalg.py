import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from reachged.linalg import (
    NumericalError,
    ShapeError,
    as_matrix,
    entrywise_l1,
    frobenius_inner,
    frobenius_norm,
    matmul,
    operator_norm,
    sigma_min,
    singular_values,
)

finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
small_dims = st.tuples(st.integers(1, 12), st.integers(1, 12))
# keeps products of entries away from the subnormal range
normal = st.floats(-100, 100).filter(lambda x: x == 0.0 or abs(x) > 1e-100)
matrices = arrays(np.float64, small_dims, elements=finite)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_matrix([[np.inf]])
    with pytest.raises(ShapeError):
        as_matrix(np.zeros((2, 2, 2)))
    with pytest.raises(ShapeError):
        as_matrix(np.zeros((0, 3)))


def test_as_matrix_is_read_only_copy():
    src = np.ones((2, 2))
    M = as_matrix(src)
    src[0, 0] = 5.0
    assert M[0, 0] == 1.0
    with pytest.raises(ValueError):
        M[0, 0] = 2.0


def test_matmul_shape_error():
    with pytest.raises(ShapeError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


@given(matrices, st.integers(1, 12))
def test_matmul_matches_numpy(D, cols):
    E = np.sin(np.arange(D.shape[1] * cols, dtype=float) + 1.0).reshape(D.shape[1], cols)
    ref = D @ E
    scale = np.abs(D) @ np.abs(E)
    assert np.all(np.abs(matmul(D, E) - ref) <= 1e-12 * scale + 1e-300)


@given(arrays(np.float64, small_dims, elements=normal), st.integers(-20, 20))
def test_scaling_invariance(D, k):
    # (D, E) -> (a D, E / a) leaves the product unchanged; powers of two make it exact
    E = np.cos(np.arange(D.shape[1] * 3, dtype=float)).reshape(D.shape[1], 3)
    a = 2.0 ** k
    assert np.array_equal(matmul(a * D, E / a), matmul(D, E))


@pytest.mark.parametrize("a", [2.0, 10.0, 1e3])
def test_scaling_invariance_general_alpha(a):
    rng = np.random.default_rng(int(a))
    D, E = rng.standard_normal((7, 9)), rng.standard_normal((9, 5))
    ref = matmul(D, E)
    assert np.allclose(matmul(a * D, E / a), ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


def test_sigma_min_examples():
    assert sigma_min(np.diag([3.0, 1.0])) == pytest.approx(1.0, rel=1e-14)
    assert sigma_min(np.ones((2, 2))) == pytest.approx(0.0, abs=1e-15)
    M = np.random.default_rng(5).standard_normal((5, 5))
    assert sigma_min(M) == pytest.approx(np.linalg.svd(M, compute_uv=False)[-1], rel=1e-8)


def test_norms_known_values():
    M = np.array([[3.0, -4.0], [0.0, 0.0]])
    assert frobenius_norm(M) == 5.0
    assert entrywise_l1(M) == 7.0
    assert frobenius_inner(M, np.ones((2, 2))) == -1.0
    assert operator_norm(M) == pytest.approx(5.0, rel=1e-12)
    assert sigma_min(M) == pytest.approx(0.0, abs=1e-15)


def test_fsum_norm_is_accurate():
    # naive accumulation drops each unit against 1e16
    M = np.array([[1e16] + [1.0] * 1000])
    assert entrywise_l1(M) == 1e16 + 1000.0
    assert frobenius_inner(M, np.ones_like(M)) == 1e16 + 1000.0


@given(matrices)
def test_singular_values_match_numpy(M):
    ours = singular_values(M)
    ref = np.linalg.svd(M, compute_uv=False)
    assert ours.shape == ref.shape
    assert np.all(np.diff(ours) <= 0)
    assert np.allclose(ours, ref, rtol=1e-10, atol=1e-12 * max(ref[0], 1e-300))


@given(matrices)
def test_operator_norm_lanczos_matches_jacobi(M):
    top = operator_norm(M, method="jacobi")
    assert operator_norm(M) == pytest.approx(top, rel=1e-8, abs=1e-300)


def test_operator_norm_clustered_top_values():
    # sigma_1 / sigma_2 = 1.0007: power iteration needs ~10^4 steps, Lanczos two
    M = np.array([[26.0, 1.0, 0.0, 0.0], [0.0, 0.0, 26.0, 0.0]])
    ref = np.linalg.svd(M, compute_uv=False)[0]
    assert operator_norm(M) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(NumericalError) as info:
        operator_norm(M, method="power")
    assert info.value.iterations == 10_000


@pytest.mark.parametrize("M,expected", [(np.diag([3.0, 1.0]), 3.0), (np.eye(7), 1.0)])
@pytest.mark.parametrize("method", ["lanczos", "power", "jacobi"])
def test_operator_norm_examples(M, expected, method):
    assert operator_norm(M, method=method) == pytest.approx(expected, rel=1e-12)


def test_random_6x4_against_numpy():
    M = np.random.default_rng(6).standard_normal((6, 4))
    ref = np.linalg.svd(M, compute_uv=False)
    for method in ("lanczos", "power", "jacobi"):
        assert operator_norm(M, method=method) == pytest.approx(ref[0], rel=1e-8)
    assert sigma_min(M) == pytest.approx(ref[-1], rel=1e-8)


@given(matrices)
def test_power_agrees_when_it_converges(M):
    try:
        p = operator_norm(M, method="power")
    except NumericalError:
        return
    assert p == pytest.approx(operator_norm(M, method="jacobi"), rel=1e-8, abs=1e-300)


@given(matrices)
def test_norm_ordering(M):
    # sigma_min <= ||M||_2 <= ||M||_F <= ||M||_1
    s_min, s_max = sigma_min(M), operator_norm(M, method="jacobi")
    f = frobenius_norm(M)
    assert s_min <= s_max * (1 + 1e-12)
    assert s_max <= f * (1 + 1e-12)
    assert f <= entrywise_l1(M) * (1 + 1e-12)


@given(matrices)
def test_frobenius_is_root_sum_of_squared_singular_values(M):
    sv = singular_values(M)
    assert math.hypot(*sv) == pytest.approx(frobenius_norm(M), rel=1e-10, abs=1e-300)


def test_rank_deficient_and_zero():
    u = np.arange(1, 6, dtype=float)[:, None]
    M = u @ u.T
    sv = singular_values(M)
    assert sv[0] == pytest.approx(55.0, rel=1e-13)
    assert np.all(sv[1:] <= 1e-12 * 55.0)
    assert operator_norm(np.zeros((3, 4))) == 0.0
    assert np.all(singular_values(np.zeros((3, 4))) == 0.0)


def test_wide_and_tall_have_min_dim_values():
    assert singular_values(np.ones((3, 7))).shape == (3,)
    assert singular_values(np.ones((7, 3))).shape == (3,)


def test_nonconvergence_is_reported():
    rng = np.random.default_rng(1)
    with pytest.raises(NumericalError) as info:
        singular_values(rng.standard_normal((30, 30)), max_sweeps=1)
    assert info.value.iterations == 1


def test_operator_norm_argument_checks():
    with pytest.raises(ValueError):
        operator_norm(np.eye(2), tol=0)
    with pytest.raises(ValueError):
        operator_norm(np.eye(2), method="arnoldi")
    with pytest.raises(ValueError):
        sigma_min(np.eye(2), tol=-1)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.data())
def test_submultiplicativity(K, N, L, data):
    D = data.draw(arrays(np.float64, (K, N), elements=normal))
    E = data.draw(arrays(np.float64, (N, L), elements=normal))
    A = matmul(D, E)
    bound = frobenius_norm(D) * operator_norm(E, method="jacobi")
    assert frobenius_norm(A) <= bound * (1 + 1e-12)
