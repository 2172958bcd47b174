"""Compare the numba and numpy enumeration kernels.

Usage: python benchmarks/bench_kernels.py [--points 2000000] [--repeat 5]

Both backends are timed on the same box and constraint stack, and their
outputs are checked for exact agreement before any timing is reported.  The
end-to-end row times one oracle call in a fresh interpreter per backend,
since the backend is fixed at import time by PROXGAP_DISABLE_NUMBA.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from proxgap import _kernels as K

ORACLE_SNIPPET = """
import time
from proxgap.oracle import solve_ip_exact
from proxgap.quadric import QuadricSet
ball = QuadricSet([[1, 0, 0], [0, 2, 0], [0, 0, 3]], ["1/3", "1/5", "1/7"], -3600)
solve_ip_exact([QuadricSet([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [0, 0, 0], -4)], (1, 1, 1))  # warm-up
t = time.perf_counter()
sol = solve_ip_exact([ball], (1, 2, 3))
print(time.perf_counter() - t, sol.points_enumerated)
"""


def _problem(points: int, n: int = 3, k: int = 2, seed: int = 0):
    rng = np.random.default_rng(seed)
    side = int(round(points ** (1.0 / n)))
    lo = np.full(n, -(side // 2), dtype=np.int64)
    dims = np.full(n, side, dtype=np.int64)
    A = rng.normal(size=(k, n, n))
    Ms = A @ A.transpose(0, 2, 1)
    bs = rng.normal(size=(k, n))
    cs = rng.normal(size=k)
    return lo, dims, int(np.prod(dims)), Ms, bs, cs


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def _oracle_time(disable: bool) -> tuple[float, int]:
    env = dict(os.environ, PROXGAP_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", ORACLE_SNIPPET], env=env, capture_output=True, text=True, check=True)
    t, pts = out.stdout.split()
    return float(t), int(pts)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-oracle", action="store_true")
    args = ap.parse_args(argv)

    if not K.HAVE_NUMBA:
        print("numba unavailable (or disabled); only the numpy backend can be timed")
        return 1

    lo, dims, count, Ms, bs, cs = _problem(args.points)
    lo_c, dims_c = np.ascontiguousarray(lo), np.ascontiguousarray(dims)

    K.residuals_numba(lo_c, dims_c, 0, 16, Ms, bs, cs)  # compile
    ref = K.residuals_numpy(lo_c, dims_c, 0, count, Ms, bs, cs)
    got = K.residuals_numba(lo_c, dims_c, 0, count, Ms, bs, cs)
    if not np.allclose(ref, got, rtol=1e-12, atol=1e-9):
        print("backends disagree")
        return 2
    if not np.array_equal(K.points_numpy(lo_c, dims_c, 0, count), K.points_numba(lo_c, dims_c, 0, count)):
        print("point blocks disagree")
        return 2

    t_np = _best(lambda: K.residuals_numpy(lo_c, dims_c, 0, count, Ms, bs, cs), args.repeat)
    t_nb = _best(lambda: K.residuals_numba(lo_c, dims_c, 0, count, Ms, bs, cs), args.repeat)
    p_np = _best(lambda: K.points_numpy(lo_c, dims_c, 0, count), args.repeat)
    p_nb = _best(lambda: K.points_numba(lo_c, dims_c, 0, count), args.repeat)

    print(f"box of {count} points in dimension {len(dims)}, {len(cs)} constraints, best of {args.repeat}")
    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    print(f"{'box_residuals':<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")
    print(f"{'box_point_block':<22}{p_np:>12.4f}{p_nb:>12.4f}{p_np / p_nb:>9.1f}x")
    if not args.skip_oracle:
        o_np, pts = _oracle_time(True)
        o_nb, _ = _oracle_time(False)
        print(f"{'oracle 3D ellipsoid':<22}{o_np:>12.4f}{o_nb:>12.4f}{o_np / o_nb:>9.1f}x   ({pts} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
