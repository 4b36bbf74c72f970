"""Time the compiled kernels against the numpy fallback on full-scale inputs.

    python3 benchmarks/bench_backends.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from reachged._backend import available


def cases(mod):
    D = mod.spike_slab(64, 64, 0.1, 0.5 ** 0.5, 0.0, 1, 0, 0)
    E = mod.spike_slab(64, 800, 0.2, 0.5 ** 0.5, 0.0, 1, 1, 0)
    F = mod.spike_slab(64, 800, 0.1, 0.5 ** 0.5, 0.0, 1, 2, 0)
    A = mod.kahan_matmul(D, E)
    M = np.random.default_rng(0).standard_normal((48, 48))
    p = np.linspace(1e-6, 1 - 1e-6, 100_000)
    return {
        "spike_slab 64x800": lambda: mod.spike_slab(64, 800, 0.2, 0.7, 0.0, 1, 1, 0),
        "norm_ppf 1e5": lambda: mod.norm_ppf(p),
        "kahan_matmul 64x64x800": lambda: mod.kahan_matmul(D, E),
        "jacobi_sv 48x48": lambda: mod.jacobi_singular_values(M, 48 * 2.2e-16, 80),
        "ged_counts 64x800": lambda: mod.ged_counts(A, F, 0.1, 0.05),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = available()
    if "compiled" not in mods:
        print("compiled extension not built; only the fallback is available")
    timings = {}
    for name, mod in sorted(mods.items()):
        for label, fn in cases(mod).items():
            number = 1 if name == "python" and "matmul" in label else 3
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            timings.setdefault(label, {})[name] = best
    print(f"{'kernel':<26}{'python ms':>12}{'compiled ms':>14}{'speedup':>10}")
    for label, t in timings.items():
        py, c = t.get("python"), t.get("compiled")
        row = f"{label:<26}{py * 1e3:>12.3f}"
        if c is not None:
            row += f"{c * 1e3:>14.3f}{py / c:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
