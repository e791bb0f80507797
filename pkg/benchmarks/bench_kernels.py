"""Time the compiled prefix-curve kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 1000 100000 1000000] [--repeat 20]
"""

import argparse
import timeit

import numpy as np

from causal_profit import _pykernels, kernels

try:
    from causal_profit import _ckernels
except ImportError:
    _ckernels = None


def make_inputs(n, seed=0):
    gen = np.random.default_rng(seed)
    t = (gen.random(n) < 0.5).astype(np.uint8)
    reward = gen.normal(size=n)
    base0 = gen.normal(size=n)
    base1 = gen.normal(size=n)
    return t, reward, base0, base1


def bench(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000, 1_000_000])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    print(f"active backend: {kernels.BACKEND}")
    if _ckernels is None:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'kernel':<13}{'n':>10}{'numpy [ms]':>13}{'cython [ms]':>13}{'speedup':>9}  equal")
    for n in args.sizes:
        inputs = make_inputs(n)
        for name in ("prefix_curve", "prefix_area"):
            py_fn = getattr(_pykernels, name)
            t_py = bench(py_fn, inputs, args.repeat)
            if _ckernels is None:
                print(f"{name:<13}{n:>10}{t_py * 1e3:>13.3f}{'-':>13}{'-':>9}  -")
                continue
            c_fn = getattr(_ckernels, name)
            t_c = bench(c_fn, inputs, args.repeat)
            same = np.array_equal(np.asarray(py_fn(*inputs)), np.asarray(c_fn(*inputs)))
            print(f"{name:<13}{n:>10}{t_py * 1e3:>13.3f}{t_c * 1e3:>13.3f}{t_py / t_c:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
