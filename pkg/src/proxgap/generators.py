"""Seeded random instances for the soundness fuzz suite.

Every generator draws integer data from ``[-bound, bound]`` and rejects draws
that land outside the requested class, so the returned instances are exact.
The objective is redrawn until the relaxation has a unique optimizer.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ProxGapError
from .lattice import MixedLattice, ellipsoid_contains_lattice_point
from .quadric import QuadricKind, QuadricSet, SocrSet, classify, qr_to_er, socr_to_qr
from .relax import RelaxationResult, RelaxStatus, solve_relaxation

MAX_TRIES = 10_000


class FuzzClass(str, enum.Enum):
    ELLIPSOID = "ellipsoid"
    PARABOLOID = "paraboloid"
    HYPERBOLOID = "hyperboloid"
    CONE = "cone"


@dataclass(frozen=True)
class RandomInstance:
    cls: FuzzClass
    set: QuadricSet
    alpha: tuple[int, ...]
    relaxation: RelaxationResult
    source: SocrSet | None = None


def _ints(rng: np.random.Generator, shape, bound: int) -> np.ndarray:
    return rng.integers(-bound, bound + 1, size=shape)


def _sym(rng: np.random.Generator, n: int, bound: int) -> np.ndarray:
    A = _ints(rng, (n, n), bound)
    return np.triu(A) + np.triu(A, 1).T


def _ilist(a) -> list:
    return [int(v) for v in np.asarray(a).ravel()]


def _imat(a) -> list[list[int]]:
    return [[int(v) for v in row] for row in np.asarray(a)]


def _ellipsoid_set(rng, n, bound):
    M = _sym(rng, n, bound)
    if np.linalg.eigvalsh(M)[0] <= 0:
        return None
    q = QuadricSet(_imat(M), _ilist(_ints(rng, n, bound)), int(_ints(rng, (), bound)))
    if classify(q).kind is not QuadricKind.ELLIPSOID:
        return None
    e = qr_to_er(q)
    # the bounds presume an integer point, so draws without one are rejected
    if not ellipsoid_contains_lattice_point(MixedLattice(e.Q), e.p, e.r).contains:
        return None
    return q


def _paraboloid_set(rng, n, bound):
    L = _ints(rng, (n - 1, n), 2)
    M = L.T @ L
    if np.abs(M).max() > bound or np.linalg.matrix_rank(M) != n - 1:
        return None
    return QuadricSet(_imat(M), _ilist(_ints(rng, n, bound)), int(_ints(rng, (), bound)))


def _socr(rng, n, bound, rows):
    A = _ints(rng, (rows, n), bound)
    return SocrSet(_imat(A), _ilist(_ints(rng, rows, bound)), _ilist(_ints(rng, n, bound)), int(_ints(rng, (), bound)))


_EXPECTED = {
    FuzzClass.ELLIPSOID: (QuadricKind.ELLIPSOID,),
    FuzzClass.PARABOLOID: (QuadricKind.PARABOLOID,),
    FuzzClass.HYPERBOLOID: (QuadricKind.TWO_SHEET_HYPERBOLOID,),
    FuzzClass.CONE: (QuadricKind.TRANSLATED_CONE,),
}


def random_set(rng: np.random.Generator, cls: FuzzClass, n: int, bound: int = 5) -> tuple[QuadricSet, SocrSet | None]:
    """One set of class ``cls`` in dimension ``n`` with integer data in [-bound, bound]."""
    cls = FuzzClass(cls)
    for _ in range(MAX_TRIES):
        src = None
        try:
            if cls is FuzzClass.ELLIPSOID:
                q = _ellipsoid_set(rng, n, bound)
            elif cls is FuzzClass.PARABOLOID:
                q = _paraboloid_set(rng, n, bound)
            else:
                src = _socr(rng, n, bound, n if cls is FuzzClass.HYPERBOLOID else n - 1)
                q = socr_to_qr(src)
            if q is None:
                continue
            if cls in (FuzzClass.HYPERBOLOID, FuzzClass.CONE) and not q.has_branch:
                continue
            if classify(q).kind in _EXPECTED[cls]:
                return q, src
        except (ProxGapError, np.linalg.LinAlgError, ValueError):
            continue
    raise RuntimeError(f"no {cls.value} instance after {MAX_TRIES} draws")


def random_objective(rng: np.random.Generator, q: QuadricSet, bound: int = 5) -> tuple[tuple[int, ...], RelaxationResult] | None:
    """An integer objective whose relaxation over ``q`` has a unique optimizer, or None."""
    for _ in range(50):
        a = tuple(int(v) for v in _ints(rng, q.n, bound))
        if not any(a):
            continue
        try:
            rel = solve_relaxation(q, a)
        except ProxGapError:
            continue
        if rel.status is RelaxStatus.SOLVABLE and rel.unique:
            return a, rel
    return None


def random_instance(rng: np.random.Generator, cls: FuzzClass, n: int, bound: int = 5) -> RandomInstance:
    cls = FuzzClass(cls)
    for _ in range(MAX_TRIES):
        q, src = random_set(rng, cls, n, bound)
        got = random_objective(rng, q, bound)
        if got is not None:
            return RandomInstance(cls, q, got[0], got[1], src)
    raise RuntimeError(f"no solvable {cls.value} instance")

