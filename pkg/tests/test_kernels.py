import os
import subprocess
import sys

import numpy as np
import pytest

from proxgap import _kernels as K


def _random_stack(rng, n, k):
    A = rng.normal(size=(k, n, n))
    Ms = A + A.transpose(0, 2, 1)
    return Ms, rng.normal(size=(k, n)), rng.normal(size=k)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_numpy_reference(n):
    rng = np.random.default_rng(n)
    lo = rng.integers(-4, 1, size=n)
    dims = rng.integers(1, 5, size=n)
    total = int(np.prod(dims))
    Ms, bs, cs = _random_stack(rng, n, 3)
    P = K.box_point_block(lo, dims, 0, total)
    assert len({tuple(p) for p in P}) == total
    assert np.all(P >= lo) and np.all(P < lo + dims)
    R = K.box_residuals(lo, dims, 0, total, Ms, bs, cs)
    direct = np.array([[p @ M @ p - 2 * b @ p + c for M, b, c in zip(Ms, bs, cs)] for p in P.astype(float)])
    assert np.allclose(R, direct)


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba backend unavailable or disabled")
@pytest.mark.parametrize("start,count", [(0, 1), (7, 50), (100, 23)])
def test_numba_matches_numpy(start, count):
    rng = np.random.default_rng(start)
    lo = np.array([-3, 2, -1], dtype=np.int64)
    dims = np.array([6, 5, 7], dtype=np.int64)
    Ms, bs, cs = _random_stack(rng, 3, 2)
    assert np.array_equal(K.points_numba(lo, dims, start, count), K.points_numpy(lo, dims, start, count))
    assert np.allclose(K.residuals_numba(lo, dims, start, count, Ms, bs, cs),
                       K.residuals_numpy(lo, dims, start, count, Ms, bs, cs), rtol=1e-12, atol=1e-12)


def test_disable_switch():
    env = dict(os.environ, PROXGAP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from proxgap import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
