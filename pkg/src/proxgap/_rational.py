"""Exact rational linear algebra on small dense matrices.

Matrices are tuples of tuples of ``Fraction``; vectors are tuples.  Everything
here is O(n^3) Gaussian elimination, which is plenty for n <= 12.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

FMat = tuple  # tuple[tuple[Fraction, ...], ...]
FVec = tuple  # tuple[Fraction, ...]


def parse_scalar(v: Any) -> Fraction | float:
    """Turn ints, Fractions and "p/q" strings into Fractions; floats stay floats."""
    if isinstance(v, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        s = v.strip()
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            pass
        return float(s)
    if isinstance(v, (float, np.floating)):
        return float(v)
    raise TypeError(f"cannot interpret {v!r} as a number")


def try_exact_vec(values: Iterable[Any]) -> FVec | None:
    out = [parse_scalar(v) for v in values]
    if all(isinstance(x, Fraction) for x in out):
        return tuple(out)
    return None


def try_exact_mat(rows: Any) -> FMat | None:
    if isinstance(rows, np.ndarray):
        if rows.dtype.kind in "iu":
            return tuple(tuple(Fraction(int(x)) for x in row) for row in rows)
        if rows.dtype.kind == "O":
            rows = rows.tolist()
        else:
            return None
    out = []
    for row in rows:
        r = try_exact_vec(row)
        if r is None:
            return None
        out.append(r)
    return tuple(out)


def try_exact_scalar(v: Any) -> Fraction | None:
    x = parse_scalar(v)
    return x if isinstance(x, Fraction) else None


def to_float_array(values: Any) -> np.ndarray:
    """Float ndarray from nested lists that may mix ints, floats, Fractions and strings."""
    arr = np.asarray(values, dtype=object)
    if arr.size == 0:
        return arr.astype(float)
    return np.vectorize(lambda v: float(parse_scalar(v)), otypes=[float])(arr)


def fvec(v: Sequence[Any]) -> FVec:
    return tuple(Fraction(x) for x in v)


def fmat(A: Sequence[Sequence[Any]]) -> FMat:
    return tuple(tuple(Fraction(x) for x in row) for row in A)


def as_float(A: FMat | FVec) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in A]) if A and isinstance(A[0], tuple) else np.array(
        [float(x) for x in A], dtype=float)


def identity(n: int) -> FMat:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> FMat:
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(m))


def transpose(A: FMat) -> FMat:
    if not A:
        return ()
    return tuple(zip(*A))


def matmul(A: FMat, B: FMat) -> FMat:
    Bt = transpose(B)
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt) for row in A)


def matvec(A: FMat, x: FVec) -> FVec:
    return tuple(sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in A)


def dot(x: FVec, y: FVec) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def sub(A: FMat, B: FMat) -> FMat:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def vsub(x: FVec, y: FVec) -> FVec:
    return tuple(a - b for a, b in zip(x, y))


def vadd(x: FVec, y: FVec) -> FVec:
    return tuple(a + b for a, b in zip(x, y))


def vscale(t: Fraction, x: FVec) -> FVec:
    return tuple(t * a for a in x)


def outer(x: FVec, y: FVec) -> FMat:
    return tuple(tuple(a * b for b in y) for a in x)


def quad(A: FMat, x: FVec) -> Fraction:
    return dot(x, matvec(A, x))


def _rref(A: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (matrix, pivot columns)."""
    m = len(A)
    n = len(A[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def rank(A: FMat) -> int:
    if not A or not A[0]:
        return 0
    _, piv = _rref([list(row) for row in A])
    return len(piv)


def det(A: FMat) -> Fraction:
    n = len(A)
    M = [list(row) for row in A]
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] / M[c][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d


def solve(A: FMat, b: FVec) -> FVec:
    """Solve a square nonsingular system exactly."""
    n = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(n)]
    R, piv = _rref(aug)
    if len(piv) < n or piv[-1] == n:
        raise ZeroDivisionError("singular system")
    return tuple(R[i][n] for i in range(n))


def solve_consistent(A: FMat, b: FVec) -> FVec | None:
    """One solution of a possibly singular system (free variables set to 0), or None."""
    m = len(A)
    n = len(A[0])
    aug = [list(A[i]) + [b[i]] for i in range(m)]
    R, piv = _rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = R[i][n]
    return tuple(x)


def inverse(A: FMat) -> FMat:
    n = len(A)
    aug = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = _rref(aug)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(R[i][n:]) for i in range(n))


def nullspace(A: FMat) -> list[FVec]:
    """Basis of the right null space."""
    m = len(A)
    n = len(A[0]) if m else 0
    R, piv = _rref([list(row) for row in A])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(tuple(v))
    return basis


def ldl(A: FMat) -> tuple[FMat, FVec]:
    """Square-root-free Cholesky A = L diag(D) L^T without pivoting.

    Raises ``ValueError`` on a zero pivot.  For a symmetric positive definite
    input every D_i is positive and equals the squared Gram-Schmidt norm of the
    i-th basis vector when A is a Gram matrix.
    """
    n = len(A)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = A[j][j] - sum((L[j][k] ** 2 * D[k] for k in range(j)), Fraction(0))
        if D[j] == 0:
            raise ValueError("zero pivot in LDL^T")
        for i in range(j + 1, n):
            L[i][j] = (A[i][j] - sum((L[i][k] * L[j][k] * D[k] for k in range(j)), Fraction(0))) / D[j]
    return tuple(tuple(r) for r in L), tuple(D)


def is_positive_definite(A: FMat) -> bool:
    try:
        _, D = ldl(A)
    except ValueError:
        return False
    return all(d > 0 for d in D)


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def lcm_of_denominators(v: Iterable[Fraction]) -> int:
    out = 1
    for x in v:
        out = out * x.denominator // math.gcd(out, x.denominator)
    return out


def sqrt_float(x: Fraction | float) -> float:
    """Float square root of a nonnegative Fraction without overflow surprises."""
    if isinstance(x, Fraction):
        if x < 0:
            raise ValueError("negative argument")
        return math.sqrt(x.numerator) / math.sqrt(x.denominator)
    return math.sqrt(x)
