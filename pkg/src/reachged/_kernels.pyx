# cython: language_level=3
"""Compiled hot loops.

Every function here has a numpy twin in ``_fallback.py`` with the same
signature. Sampling and the Kahan products are bit-identical between the
two (both take ``log`` from libm); the Jacobi rotations may differ in the
last ulp because numpy's reductions sum in a different order.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, log, sqrt
from libc.stdint cimport uint32_t, uint64_t

cnp.import_array()

cdef uint32_t PHILOX_M0 = 0xD2511F53
cdef uint32_t PHILOX_M1 = 0xCD9E8D57
cdef uint32_t PHILOX_W0 = 0x9E3779B9
cdef uint32_t PHILOX_W1 = 0xBB67AE85
cdef double TWO_M52 = 2.220446049250313e-16

# AS241 (PPND16) coefficients
cdef double A0 = 3.3871328727963666080e0
cdef double A1 = 1.3314166789178437745e+2
cdef double A2 = 1.9715909503065514427e+3
cdef double A3 = 1.3731693765509461125e+4
cdef double A4 = 4.5921953931549871457e+4
cdef double A5 = 6.7265770927008700853e+4
cdef double A6 = 3.3430575583588128105e+4
cdef double A7 = 2.5090809287301226727e+3
cdef double B1 = 4.2313330701600911252e+1
cdef double B2 = 6.8718700749205790830e+2
cdef double B3 = 5.3941960214247511077e+3
cdef double B4 = 2.1213794301586595867e+4
cdef double B5 = 3.9307895800092710610e+4
cdef double B6 = 2.8729085735721942674e+4
cdef double B7 = 5.2264952788528545610e+3
cdef double C0 = 1.42343711074968357734e0
cdef double C1 = 4.63033784615654529590e0
cdef double C2 = 5.76949722146069140550e0
cdef double C3 = 3.64784832476320460504e0
cdef double C4 = 1.27045825245236838258e0
cdef double C5 = 2.41780725177450611770e-1
cdef double C6 = 2.27238449892691845833e-2
cdef double C7 = 7.74545014278341407640e-4
cdef double D1 = 2.05319162663775882187e0
cdef double D2 = 1.67638483018380384940e0
cdef double D3 = 6.89767334985100004550e-1
cdef double D4 = 1.48103976427480074590e-1
cdef double D5 = 1.51986665636164571966e-2
cdef double D6 = 5.47593808499534494600e-4
cdef double D7 = 1.05075007164441684324e-9
cdef double E0 = 6.65790464350110377720e0
cdef double E1 = 5.46378491116411436990e0
cdef double E2 = 1.78482653991729133580e0
cdef double E3 = 2.96560571828504891230e-1
cdef double E4 = 2.65321895265761230930e-2
cdef double E5 = 1.24266094738807843860e-3
cdef double E6 = 2.71155556874348757815e-5
cdef double E7 = 2.01033439929228813265e-7
cdef double F1 = 5.99832206555887937690e-1
cdef double F2 = 1.36929880922735805310e-1
cdef double F3 = 1.48753612908506148525e-2
cdef double F4 = 7.86869131145613259100e-4
cdef double F5 = 1.84631831751005468180e-5
cdef double F6 = 1.42151175831644588870e-7
cdef double F7 = 2.04426310338993978564e-15


cdef inline void _philox(uint32_t k0, uint32_t k1, uint32_t* c) noexcept nogil:
    cdef uint64_t p0, p1
    cdef uint32_t c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3]
    cdef int i
    for i in range(10):
        p0 = <uint64_t>PHILOX_M0 * c0
        p1 = <uint64_t>PHILOX_M1 * c2
        c0 = <uint32_t>(p1 >> 32) ^ c1 ^ k0
        c1 = <uint32_t>p1
        c2 = <uint32_t>(p0 >> 32) ^ c3 ^ k1
        c3 = <uint32_t>p0
        k0 = k0 + PHILOX_W0
        k1 = k1 + PHILOX_W1
    c[0] = c0
    c[1] = c1
    c[2] = c2
    c[3] = c3


cdef inline double _unit(uint32_t lo, uint32_t hi) noexcept nogil:
    cdef uint64_t x = (<uint64_t>hi << 32) | lo
    return (<double>(x >> 12) + 0.5) * TWO_M52


cdef inline double _ppf(double p) noexcept nogil:
    cdef double q = p - 0.5
    cdef double r, x
    if fabs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * (((((((A7 * r + A6) * r + A5) * r + A4) * r + A3) * r + A2) * r + A1) * r + A0) / \
            (((((((B7 * r + B6) * r + B5) * r + B4) * r + B3) * r + B2) * r + B1) * r + 1.0)
    if q < 0.0:
        r = p
    else:
        r = 1.0 - p
    r = sqrt(-log(r))
    if r <= 5.0:
        r = r - 1.6
        x = (((((((C7 * r + C6) * r + C5) * r + C4) * r + C3) * r + C2) * r + C1) * r + C0) / \
            (((((((D7 * r + D6) * r + D5) * r + D4) * r + D3) * r + D2) * r + D1) * r + 1.0)
    else:
        r = r - 5.0
        x = (((((((E7 * r + E6) * r + E5) * r + E4) * r + E3) * r + E2) * r + E1) * r + E0) / \
            (((((((F7 * r + F6) * r + F5) * r + F4) * r + F3) * r + F2) * r + F1) * r + 1.0)
    if q < 0.0:
        return -x
    return x


def philox4x32(uint32_t k0, uint32_t k1, uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3):
    cdef uint32_t c[4]
    c[0] = c0
    c[1] = c1
    c[2] = c2
    c[3] = c3
    _philox(k0, k1, c)
    return (c[0], c[1], c[2], c[3])


def norm_ppf(cnp.ndarray p):
    cdef double[::1] src = np.ascontiguousarray(p, dtype=np.float64).ravel()
    out = np.empty(src.shape[0], dtype=np.float64)
    cdef double[::1] dst = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _ppf(src[i])
    return out.reshape(np.shape(p))


def spike_slab(Py_ssize_t rows, Py_ssize_t cols, double density, double sd,
               double mean, uint64_t seed, uint32_t stream, uint32_t replication):
    """Fill a rows x cols matrix; entry ``i`` uses Philox counter (i, stream, replication)."""
    out = np.zeros((rows, cols), dtype=np.float64)
    cdef double[:, ::1] m = out
    cdef uint32_t k0 = <uint32_t>seed
    cdef uint32_t k1 = <uint32_t>(seed >> 32)
    cdef uint32_t c[4]
    cdef Py_ssize_t i, j
    cdef uint64_t idx
    if density <= 0.0:
        return out
    with nogil:
        for i in range(rows):
            for j in range(cols):
                idx = <uint64_t>(i * cols + j)
                c[0] = <uint32_t>idx
                c[1] = <uint32_t>(idx >> 32)
                c[2] = stream
                c[3] = replication
                _philox(k0, k1, c)
                if _unit(c[0], c[1]) < density:
                    m[i, j] = mean + sd * _ppf(_unit(c[2], c[3]))
    return out


def kahan_matmul(const double[:, ::1] D, const double[:, ::1] E):
    """Product with a compensated left-to-right sum over the inner index."""
    cdef Py_ssize_t K = D.shape[0], N = D.shape[1], L = E.shape[1]
    if E.shape[0] != N:
        raise ValueError("inner dimensions differ")
    cdef const double[:, ::1] Et = np.ascontiguousarray(np.asarray(E).T)
    out = np.empty((K, L), dtype=np.float64)
    cdef double[:, ::1] A = out
    cdef Py_ssize_t k, l, n
    cdef double s, comp, y, t
    with nogil:
        for k in range(K):
            for l in range(L):
                s = 0.0
                comp = 0.0
                for n in range(N):
                    y = D[k, n] * Et[l, n] - comp
                    t = s + y
                    comp = (t - s) - y
                    s = t
                A[k, l] = s
    return out


def jacobi_singular_values(const double[:, :] M, double tol=1e-15, int max_sweeps=80):
    """One-sided (Hestenes) Jacobi. Returns the min(rows, cols) singular values, descending.

    Returns ``(values, sweeps)``; ``sweeps == -1`` signals non-convergence.
    """
    cdef Py_ssize_t m = M.shape[0], n = M.shape[1]
    arr = np.asarray(M, dtype=np.float64)
    if m < n:
        arr = arr.T
        m, n = n, m
    # columns of the tall matrix stored as contiguous rows
    cdef double[:, ::1] W = np.array(arr.T, dtype=np.float64, order="C")
    cdef Py_ssize_t i, j, r
    cdef double alpha, beta, gamma, zeta, t, cs, sn, wi, wj
    cdef int sweep, rotated = 1, used = -1
    # columns below eps * ||M||_F are rounding residue; rotating them can cycle forever
    cdef double floor = np.sum(np.square(arr)) * 4.930380657631324e-32
    with nogil:
        for sweep in range(max_sweeps):
            rotated = 0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    alpha = 0.0
                    beta = 0.0
                    gamma = 0.0
                    for r in range(m):
                        alpha = alpha + W[i, r] * W[i, r]
                        beta = beta + W[j, r] * W[j, r]
                        gamma = gamma + W[i, r] * W[j, r]
                    if gamma == 0.0 or alpha <= floor or beta <= floor:
                        continue
                    if fabs(gamma) <= tol * sqrt(alpha * beta):
                        continue
                    rotated = 1
                    zeta = (beta - alpha) / (2.0 * gamma)
                    if zeta >= 0.0:
                        t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                    else:
                        t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                    cs = 1.0 / sqrt(1.0 + t * t)
                    sn = cs * t
                    for r in range(m):
                        wi = W[i, r]
                        wj = W[j, r]
                        W[i, r] = cs * wi - sn * wj
                        W[j, r] = sn * wi + cs * wj
            if not rotated:
                used = sweep + 1
                break
    values = np.sqrt(np.einsum("ij,ij->i", np.asarray(W), np.asarray(W)))
    values[::-1].sort()
    return values, used


def ged_counts(const double[:, ::1] A, const double[:, ::1] F, double tau, double tau_F):
    """Return (misses, extras, demand_edges, reached, exact_zeros) for |A| >= tau vs |F| >= tau_F."""
    cdef Py_ssize_t K = A.shape[0], L = A.shape[1]
    if F.shape[0] != K or F.shape[1] != L:
        raise ValueError("shape mismatch")
    cdef Py_ssize_t i, n = K * L
    cdef const double* pa = &A[0, 0]
    cdef const double* pf = &F[0, 0]
    cdef long misses = 0, extras = 0, demand = 0, reached = 0, zeros = 0
    cdef long s, b
    with nogil:
        # flat, branch-free loop so the compiler can vectorize the five reductions
        for i in range(n):
            s = fabs(pf[i]) >= tau_F
            b = fabs(pa[i]) >= tau
            demand += s
            reached += b
            misses += s & (1 - b)
            extras += b & (1 - s)
            zeros += pa[i] == 0.0
    return misses, extras, demand, reached, zeros
