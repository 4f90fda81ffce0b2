"""Time the compiled RK4 kernel against the numpy path.

    python3 benchmarks/bench_rk4.py [--steps N] [--repeat R] [--n N] [--s S]
"""
import argparse
import time

import numpy as np

from cmagnet import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--s", type=int, default=2)
    args = ap.parse_args()

    dim = 2 * args.n + args.s
    rng = np.random.default_rng(0)
    p0 = rng.standard_normal(dim)
    T0 = rng.standard_normal(dim)
    T0 /= np.linalg.norm(T0)
    call = (p0, T0, 1.5, args.n, 1e-3, args.steps, 0.0)

    if _kernels.rk4_lorentz_numba is None:
        raise SystemExit("numba is not importable")
    start = time.perf_counter()
    Pn, _ = _kernels.rk4_lorentz_numba(*call)
    compile_s = time.perf_counter() - start

    t_numba = best_of(lambda: _kernels.rk4_lorentz_numba(*call), args.repeat)
    t_numpy = best_of(lambda: _kernels.rk4_lorentz_numpy(*call), args.repeat)
    Pp, _ = _kernels.rk4_lorentz_numpy(*call)

    print(f"dim={dim} steps={args.steps} repeat={args.repeat}")
    print(f"numba first call (incl. compile/cache load): {compile_s:.3f} s")
    print(f"numba  best: {t_numba * 1e3:9.3f} ms")
    print(f"numpy  best: {t_numpy * 1e3:9.3f} ms")
    print(f"speedup:     {t_numpy / t_numba:9.1f}x")
    print(f"max |P_numba - P_numpy|: {np.max(np.abs(Pn - Pp)):.2e}")


if __name__ == "__main__":
    main()
