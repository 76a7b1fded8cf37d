"""Time the dilogarithm and biquadratic kernels: numba, numpy, pure python.

    python benchmarks/bench_kernels.py --n 200000 --repeat 5
"""
import argparse
import time

import numpy as np

from dpainleve import kernels as K
from dpainleve.model import builtin_matrix, make_spec


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000, help="points per kernel call")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--python-n", type=int, default=20_000,
                    help="points for the (slow) pure-python loops; timings are scaled to --n")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    z = rng.uniform(-3, 3, args.n) + 1j * rng.uniform(-3, 3, args.n)
    f = rng.uniform(-2, 2, args.n) + 1j * rng.uniform(-2, 2, args.n)
    g = rng.uniform(-2, 2, args.n) + 1j * rng.uniform(-2, 2, args.n)
    spec = make_spec("D6", {"a1": 0.5 + 0.1j, "b1": 0.4, "s": 1.3})
    m = builtin_matrix(spec).rows
    mb = m.copy()
    k = min(args.python_n, args.n)
    scale = args.n / k

    cases = {
        "li2": {
            "python": lambda: K.li2_loop_py(z[:k]),
            "numpy": lambda: K.li2_array_numpy(z),
            "numba": (lambda: K.li2_loop_nb(z)) if K.HAVE_NUMBA else None,
        },
        "biquad": {
            "python": lambda: K.biquad_loop_py(m, f[:k], g[:k]),
            "numpy": lambda: K.biquad_array_numpy(m, f, g),
            "numba": (lambda: K.biquad_loop_nb(m, f, g)) if K.HAVE_NUMBA else None,
        },
        "biquad_step": {
            "python": lambda: K.biquad_step_loop_py(m, mb, f[:k], g[:k]),
            "numpy": lambda: K.biquadratic_step_numpy(m, mb, f, g),
            "numba": (lambda: K.biquad_step_loop_nb(m, mb, f, g)) if K.HAVE_NUMBA else None,
        },
    }

    # agreement between backends before timing anything
    ref = K.li2_array_numpy(z[:k])
    assert np.allclose(K.li2_loop_py(z[:k]), ref, rtol=1e-12, atol=1e-14)
    if K.HAVE_NUMBA:
        assert np.allclose(K.li2_loop_nb(z[:k]), ref, rtol=1e-12, atol=1e-14)
        for fn in cases.values():
            fn["numba"]()  # compile outside the timed region

    print(f"n={args.n} repeat={args.repeat} numba={'yes' if K.HAVE_NUMBA else 'no'}")
    print(f"{'kernel':<12}{'backend':<8}{'seconds':>12}{'ns/point':>12}")
    for name, backends in cases.items():
        for backend, fn in backends.items():
            if fn is None:
                print(f"{name:<12}{backend:<8}{'n/a':>12}")
                continue
            t = best_of(fn, args.repeat if backend != "python" else 1)
            if backend == "python":
                t *= scale
            print(f"{name:<12}{backend:<8}{t:>12.4f}{1e9 * t / args.n:>12.1f}")


if __name__ == "__main__":
    main()
