"""Time the compiled and pure-Python evaluation kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Both backends are checked to agree before anything is timed.
"""
import argparse
import timeit

import numpy as np

from holorep import _core
from holorep import multiindex as mi
from holorep.rng import SplitMix64

CASES = [  # (dimension, degree, number of points)
    (1, 40, 1024),
    (2, 12, 1024),
    (2, 20, 4096),
    (3, 8, 4096),
]


def make_case(n, D, count, rng):
    exps = np.asarray(mi.indices_up_to(n, D), dtype=np.int64)
    coeffs = rng.complex_normals(len(exps))
    radii = np.asarray([rng.uniform(0.2, 0.95) for _ in range(count * n)]).reshape(count, n)
    phases = np.exp(2j * np.pi * np.asarray([rng.uniform() for _ in range(count * n)]).reshape(count, n))
    return radii * phases, exps, coeffs


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not _core.HAVE_CYTHON:
        print("compiled kernels not built; only the python backend is timed")
    backends = ["python"] + (["cython"] if _core.HAVE_CYTHON else [])
    rng = SplitMix64(args.seed)
    header = f"{'kernel':<14}{'n':>3}{'D':>4}{'terms':>7}{'points':>8}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for n, D, count in CASES:
        pts, exps, coeffs = make_case(n, D, count, rng)
        for name in ("eval_terms", "max_abs_terms"):
            fn = getattr(_core, name)
            ref = fn(pts, exps, coeffs, backend="python")
            times = []
            for b in backends:
                got = fn(pts, exps, coeffs, backend=b)
                if not np.allclose(got, ref, rtol=1e-12, atol=1e-12):
                    raise SystemExit(f"{name}: backend {b} disagrees with python")
                times.append(best_time(lambda b=b: fn(pts, exps, coeffs, backend=b), args.repeat))
            line = f"{name:<14}{n:>3}{D:>4}{len(exps):>7}{count:>8}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
            if len(times) == 2:
                line += f"{times[0] / times[1]:>9.1f}x"
            print(line)


if __name__ == "__main__":
    main()
