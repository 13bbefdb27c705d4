"""Compare the compiled and NumPy displacement kernels.

    python benchmarks/bench_kernels.py [--points 2400] [--dim 24] [--repeat 5]

The default problem is one reconstruction on the default tomography mesh.
"""

import argparse
import time

import numpy as np

from iontomo import _kernels_py, kernels, tomography


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=None, help="default: full default mesh")
    ap.add_argument("--dim", type=int, default=24)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    kk, tt = tomography.QuadSpec().mesh()
    lams = -1j * kk * np.exp(1j * tt)
    if args.points is not None:
        lams = np.resize(lams, args.points)
    coeffs = np.random.default_rng(0).normal(size=len(lams)) + 0j

    backends = {"python": _kernels_py}
    try:
        from iontomo import _kernels

        backends["compiled"] = _kernels
    except ImportError:
        print("compiled extension not built; only the NumPy fallback is timed")

    print(f"selected backend: {kernels.BACKEND}; {len(lams)} points, dim {args.dim}")
    results = {}
    for name, mod in backends.items():
        t, out = best_of(lambda: mod.displacement_sum(lams, coeffs, args.dim), args.repeat)
        results[name] = (t, out)
        print(f"{name:>9s}: {t * 1e3:9.2f} ms")
    if len(results) == 2:
        tp, op = results["python"]
        tc, oc = results["compiled"]
        print(f"speedup: {tp / tc:.1f}x; max |difference| = {np.abs(op - oc).max():.2e}")


if __name__ == "__main__":
    main()
