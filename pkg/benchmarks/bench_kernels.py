"""Compare the numba and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel is run once on both backends to check the results agree (and to
trigger JIT compilation), then timed over ``--repeat`` runs.  Timings are
wall-clock medians in milliseconds.
"""

import argparse
import statistics
import time

import numpy as np

from multcode import _kernels
from multcode.code import CodeParams, all_points
from multcode.gf import ext_field, prime_field
from multcode.sysenc import evaluation_rows


def _time(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append((time.perf_counter() - t0) * 1000)
    return statistics.median(out)


def _greedy_case(params):
    pts = all_points(params.q, params.m)
    per = max(1, 512 // params.sym_len)

    def run(backend):
        chunks = (evaluation_rows(params, pts[lo:lo + per]) for lo in range(0, len(pts), per))
        return _kernels.greedy_rows(chunks, params.dim, params.q, params.dim, backend=backend)

    return run


def cases(rng):
    F = prime_field(31)
    A = rng.integers(0, 31, size=(200, 240))
    yield "rref F_31 200x240", lambda b: _kernels.rref(A, F.spec, backend=b)[0]

    E = ext_field(13, 2)
    X = rng.integers(0, E.order, size=(60, 80))
    Y = rng.integers(0, E.order, size=(80, 60))
    yield "rref F_169 60x80", lambda b: _kernels.rref(X, E.spec, backend=b)[0]
    yield "matmul F_169 60x80x60", lambda b: _kernels.matmul(X, Y, E.spec, backend=b)

    run = _greedy_case(CodeParams(31, 2, 4, 40))
    yield "greedy rows q=31 m=2 s=4 d=40", run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print("%-32s %12s %12s %8s" % ("kernel", "numpy ms", "numba ms", "speedup"))
    for name, fn in cases(rng):
        a, b = fn("numpy"), fn("numba")
        if not np.array_equal(np.asarray(a), np.asarray(b)):
            raise SystemExit("backends disagree on %s" % name)
        t_np = _time(lambda: fn("numpy"), args.repeat)
        t_nb = _time(lambda: fn("numba"), args.repeat)
        print("%-32s %12.2f %12.2f %7.1fx" % (name, t_np, t_nb, t_np / t_nb))


if __name__ == "__main__":
    main()
