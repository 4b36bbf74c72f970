"""numpy implementations of the kernels in ``_kernels.pyx``.

Same signatures and the same arithmetic order, so that the Philox stream, the
spike pattern and the Kahan products agree bit for bit with the compiled path.
"""
import math

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S12 = np.uint64(12)
_TWO_M52 = 2.220446049250313e-16

_A = (3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
      1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
      3.3430575583588128105e+4, 2.5090809287301226727e+3)
_B = (1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2, 5.3941960214247511077e+3,
      2.1213794301586595867e+4, 3.9307895800092710610e+4, 2.8729085735721942674e+4,
      5.2264952788528545610e+3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _horner(coef, r):
    acc = coef[7] * r + coef[6]
    for c in coef[5::-1]:
        acc = acc * r + c
    return acc


def _philox_arrays(k0, k1, c0, c1, c2, c3):
    k0 = np.uint64(k0)
    k1 = np.uint64(k1)
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = ((p1 >> _S32) ^ c1 ^ k0, p1 & _MASK32,
                          (p0 >> _S32) ^ c3 ^ k1, p0 & _MASK32)
        k0 = np.uint64((int(k0) + _W0) & 0xFFFFFFFF)
        k1 = np.uint64((int(k1) + _W1) & 0xFFFFFFFF)
    return c0, c1, c2, c3


def _unit(lo, hi):
    x = (hi << _S32) | lo
    return ((x >> _S12).astype(np.float64) + 0.5) * _TWO_M52


def philox4x32(k0, k1, c0, c1, c2, c3):
    words = [np.array([w], dtype=np.uint64) for w in (c0, c1, c2, c3)]
    out = _philox_arrays(k0, k1, *words)
    return tuple(int(w[0]) for w in out)


def norm_ppf(p):
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    out = np.empty_like(p)
    central = np.abs(q) <= 0.425
    qc = q[central]
    r = 0.180625 - qc * qc
    out[central] = qc * _horner(_A, r) / _horner(_B, r)

    tail = ~central
    qt = q[tail]
    r = np.where(qt < 0.0, p[tail], 1.0 - p[tail])
    # libm log, not numpy's vectorized one, so the two backends agree to the bit
    r = np.sqrt(-np.array([math.log(x) for x in r.tolist()], dtype=np.float64))
    x = np.empty_like(r)
    near = r <= 5.0
    rn = r[near] - 1.6
    x[near] = _horner(_C, rn) / _horner(_D, rn)
    rf = r[~near] - 5.0
    x[~near] = _horner(_E, rf) / _horner(_F, rf)
    out[tail] = np.where(qt < 0.0, -x, x)
    return out


def spike_slab(rows, cols, density, sd, mean, seed, stream, replication):
    out = np.zeros((rows, cols), dtype=np.float64)
    if density <= 0.0:
        return out
    idx = np.arange(rows * cols, dtype=np.uint64)
    n = idx.shape[0]
    w = _philox_arrays(
        seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF,
        idx & _MASK32, idx >> _S32,
        np.full(n, stream, dtype=np.uint64), np.full(n, replication, dtype=np.uint64),
    )
    keep = _unit(w[0], w[1]) < density
    flat = out.reshape(-1)
    flat[keep] = mean + sd * norm_ppf(_unit(w[2][keep], w[3][keep]))
    return out


def kahan_matmul(D, E):
    D = np.ascontiguousarray(D, dtype=np.float64)
    E = np.ascontiguousarray(E, dtype=np.float64)
    if D.shape[1] != E.shape[0]:
        raise ValueError("inner dimensions differ")
    s = np.zeros((D.shape[0], E.shape[1]))
    comp = np.zeros_like(s)
    for n in range(D.shape[1]):
        y = np.multiply.outer(D[:, n], E[n, :]) - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


def jacobi_singular_values(M, tol=1e-15, max_sweeps=80):
    W = np.array(M, dtype=np.float64)
    if W.shape[0] < W.shape[1]:
        W = W.T
    W = np.ascontiguousarray(W.T)
    n = W.shape[0]
    floor = float(np.sum(np.square(W))) * 4.930380657631324e-32
    used = -1
    for sweep in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                wi = W[i]
                wj = W[j]
                alpha = float(wi @ wi)
                beta = float(wj @ wj)
                gamma = float(wi @ wj)
                if gamma == 0.0 or alpha <= floor or beta <= floor:
                    continue
                if abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / np.sqrt(1.0 + t * t)
                sn = cs * t
                W[i], W[j] = cs * wi - sn * wj, sn * wi + cs * wj
        if not rotated:
            used = sweep + 1
            break
    values = np.sqrt(np.einsum("ij,ij->i", W, W))
    values[::-1].sort()
    return values, used


def ged_counts(A, F, tau, tau_F):
    A = np.asarray(A)
    F = np.asarray(F)
    if A.shape != F.shape:
        raise ValueError("shape mismatch")
    s = np.abs(F) >= tau_F
    b = np.abs(A) >= tau
    return (
        int(np.count_nonzero(s & ~b)),
        int(np.count_nonzero(b & ~s)),
        int(np.count_nonzero(s)),
        int(np.count_nonzero(b)),
        int(np.count_nonzero(A == 0.0)),
    )
