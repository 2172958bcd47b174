"""Hot loops of the enumeration oracle.

Each kernel evaluates a stack of quadratic residuals

    res_k(x) = x^T M_k x - 2 b_k^T x + c_k

at the integer points of an axis-aligned box, addressed by their row-major
flat index (last coordinate fastest).  The numba versions walk the box with an
odometer; the numpy versions unravel indices and use einsum.  Setting the
environment variable ``PROXGAP_DISABLE_NUMBA=1`` before import selects the
numpy path everywhere.
"""

from __future__ import annotations

import os

import numpy as np

_disabled = os.environ.get("PROXGAP_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by PROXGAP_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def _points_numpy(lo: np.ndarray, dims: np.ndarray, start: int, count: int) -> np.ndarray:
    idx = np.arange(start, start + count, dtype=np.int64)
    coords = np.unravel_index(idx, tuple(int(d) for d in dims))
    return np.stack(coords, axis=1).astype(np.int64) + lo[None, :]


def residuals_numpy(lo, dims, start, count, Ms, bs, cs) -> np.ndarray:
    """Residual matrix of shape (count, K) for the box points start..start+count-1."""
    P = _points_numpy(lo, dims, start, count).astype(np.float64)
    quad = np.einsum("pi,kij,pj->pk", P, Ms, P, optimize=True)
    return quad - 2.0 * (P @ bs.T) + cs[None, :]


def points_numpy(lo, dims, start, count) -> np.ndarray:
    return _points_numpy(lo, dims, start, count)


if HAVE_NUMBA:

    @njit(cache=True)
    def _residuals_numba(lo, dims, start, count, Ms, bs, cs):  # pragma: no cover - compiled
        n = lo.shape[0]
        K = cs.shape[0]
        out = np.empty((count, K))
        # decode the starting index into an odometer state
        digit = np.empty(n, dtype=np.int64)
        rem = start
        for i in range(n - 1, -1, -1):
            digit[i] = rem % dims[i]
            rem //= dims[i]
        x = np.empty(n)
        for p in range(count):
            for i in range(n):
                x[i] = lo[i] + digit[i]
            for k in range(K):
                acc = cs[k]
                for i in range(n):
                    xi = x[i]
                    row = 0.0
                    for j in range(n):
                        row += Ms[k, i, j] * x[j]
                    acc += xi * (row - 2.0 * bs[k, i])
                out[p, k] = acc
            # advance odometer
            i = n - 1
            while i >= 0:
                digit[i] += 1
                if digit[i] < dims[i]:
                    break
                digit[i] = 0
                i -= 1
        return out

    @njit(cache=True)
    def _points_numba(lo, dims, start, count):  # pragma: no cover - compiled
        n = lo.shape[0]
        out = np.empty((count, n), dtype=np.int64)
        digit = np.empty(n, dtype=np.int64)
        rem = start
        for i in range(n - 1, -1, -1):
            digit[i] = rem % dims[i]
            rem //= dims[i]
        for p in range(count):
            for i in range(n):
                out[p, i] = lo[i] + digit[i]
            i = n - 1
            while i >= 0:
                digit[i] += 1
                if digit[i] < dims[i]:
                    break
                digit[i] = 0
                i -= 1
        return out

    def residuals_numba(lo, dims, start, count, Ms, bs, cs) -> np.ndarray:
        return _residuals_numba(lo, dims, np.int64(start), np.int64(count), Ms, bs, cs)

    def points_numba(lo, dims, start, count) -> np.ndarray:
        return _points_numba(lo, dims, np.int64(start), np.int64(count))

    residuals = residuals_numba
    box_points = points_numba
else:
    residuals = residuals_numpy
    box_points = points_numpy


def box_residuals(lo: np.ndarray, dims: np.ndarray, start: int, count: int,
                  Ms: np.ndarray, bs: np.ndarray, cs: np.ndarray) -> np.ndarray:
    """Dispatch to the selected backend with normalised dtypes."""
    return residuals(np.ascontiguousarray(lo, dtype=np.int64), np.ascontiguousarray(dims, dtype=np.int64),
                     int(start), int(count), np.ascontiguousarray(Ms, dtype=np.float64),
                     np.ascontiguousarray(bs, dtype=np.float64), np.ascontiguousarray(cs, dtype=np.float64))


def box_point_block(lo: np.ndarray, dims: np.ndarray, start: int, count: int) -> np.ndarray:
    return box_points(np.ascontiguousarray(lo, dtype=np.int64), np.ascontiguousarray(dims, dtype=np.int64),
                      int(start), int(count))
