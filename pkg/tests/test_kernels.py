"""Kernel-level checks shared by the compiled and fallback backends."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.special import ndtri

from reachged._backend import available

# Random123 known-answer vectors for Philox4x32-10: (key, counter, output)
PHILOX_KAT = [
    ((0, 0), (0, 0, 0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF, 0xFFFFFFFF), (0xFFFFFFFF,) * 4, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0xA4093822, 0x299F31D0), (0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
]


@pytest.mark.parametrize("key,ctr,expected", PHILOX_KAT)
def test_philox_known_answers(backend, key, ctr, expected):
    assert tuple(backend.philox4x32(*key, *ctr)) == expected


def test_norm_ppf_matches_ndtri(backend):
    p = np.concatenate([
        np.linspace(1e-300, 1e-10, 50), np.linspace(1e-6, 1 - 1e-6, 2001), 1 - np.logspace(-16, -3, 40),
    ])
    got = backend.norm_ppf(p)
    ref = ndtri(p)
    assert np.allclose(got, ref, rtol=1e-14, atol=1e-15)


def test_norm_ppf_symmetry(backend):
    p = np.linspace(0.001, 0.499, 499)
    assert np.allclose(backend.norm_ppf(p), -backend.norm_ppf(1 - p), rtol=1e-14, atol=1e-15)


def test_spike_slab_density_and_moments(backend):
    M = backend.spike_slab(400, 500, 0.3, 2.0, 1.0, 99, 0, 0)
    active = M != 0
    assert abs(active.mean() - 0.3) < 0.005
    vals = M[active]
    assert abs(vals.mean() - 1.0) < 0.02
    assert abs(vals.std() - 2.0) < 0.02


def test_spike_slab_streams_differ(backend):
    a = backend.spike_slab(8, 8, 1.0, 1.0, 0.0, 5, 0, 0)
    b = backend.spike_slab(8, 8, 1.0, 1.0, 0.0, 5, 1, 0)
    c = backend.spike_slab(8, 8, 1.0, 1.0, 0.0, 5, 0, 1)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_spike_slab_prefix_stable(backend):
    # entry index is row-major, so a wider draw extends rather than reshuffles
    small = backend.spike_slab(1, 10, 0.5, 1.0, 0.0, 17, 2, 3)
    big = backend.spike_slab(1, 30, 0.5, 1.0, 0.0, 17, 2, 3)
    assert np.array_equal(small[0], big[0, :10])


def test_kahan_matmul_close_to_numpy(backend):
    rng = np.random.default_rng(0)
    D, E = rng.standard_normal((13, 29)), rng.standard_normal((29, 7))
    assert np.allclose(backend.kahan_matmul(D, E), D @ E, rtol=1e-13, atol=1e-13)


def test_kahan_matmul_compensates():
    # naive left-to-right summation loses the small terms entirely
    D = np.array([[1e16, 1.0, 1.0, -1e16]])
    E = np.ones((4, 1))
    for mod in available().values():
        assert mod.kahan_matmul(D, E)[0, 0] == 2.0


def test_ged_counts_simple(backend):
    A = np.array([[0.2, 0.0], [0.05, -0.3]])
    F = np.array([[0.0, 0.1], [0.06, -0.2]])
    misses, extras, demand, reached, zeros = backend.ged_counts(A, F, 0.1, 0.05)
    assert (misses, extras, demand, reached, zeros) == (2, 1, 3, 2, 1)


@pytest.mark.skipif(len(available()) < 2, reason="compiled extension not built")
class TestBackendsAgree:
    def setup_method(self):
        self.c = available()["compiled"]
        self.p = available()["python"]

    @given(st.integers(1, 20), st.integers(1, 20), st.sampled_from([0.0, 0.1, 0.5, 1.0]),
           st.integers(0, 2 ** 64 - 1), st.integers(0, 2 ** 32 - 1), st.integers(0, 2 ** 32 - 1))
    def test_spike_slab_bit_identical(self, r, c, p, seed, stream, rep):
        a = self.c.spike_slab(r, c, p, 0.7, 0.1, seed, stream, rep)
        b = self.p.spike_slab(r, c, p, 0.7, 0.1, seed, stream, rep)
        assert a.tobytes() == b.tobytes()

    @given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)),
                  elements=st.floats(-1e3, 1e3)), st.integers(1, 8))
    def test_matmul_bit_identical(self, D, cols):
        E = np.cos(np.arange(D.shape[1] * cols, dtype=float)).reshape(D.shape[1], cols)
        D = np.ascontiguousarray(D)
        assert self.c.kahan_matmul(D, E).tobytes() == self.p.kahan_matmul(D, E).tobytes()

    def test_jacobi_agree(self):
        rng = np.random.default_rng(3)
        for shape in [(5, 9), (9, 5), (20, 20)]:
            M = rng.standard_normal(shape)
            a, sa = self.c.jacobi_singular_values(M, 1e-14, 80)
            b, sb = self.p.jacobi_singular_values(M, 1e-14, 80)
            assert sa >= 0 and sb >= 0
            assert np.allclose(a, b, rtol=1e-12)

    @given(st.lists(st.integers(0, 2 ** 32 - 1), min_size=6, max_size=6))
    def test_philox_agree(self, words):
        assert tuple(self.c.philox4x32(*words)) == tuple(self.p.philox4x32(*words))
