"""Parameterized example families with known integrality gaps.

Each builder returns a ``FamilyInstance`` holding the constraint sets, the
objective, the closed-form relaxation value and integrality gap, and a
feasible integer witness.  The relaxation of a multi-set family comes from
its closed form and is cross-checked by ``grid_scan_relaxation`` rather than
by a general conic solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .bounds import TwoSphereInstance
from .oracle import Halfspace, compile_sets
from .quadric import QuadricSet, SocrSet, socr_to_qr

Number = Fraction | float


@dataclass(frozen=True)
class FamilyInstance:
    name: str
    N: int
    sets: tuple
    alpha: tuple[int, ...]
    relax_value: Number
    relax_point: tuple[float, ...]
    closed_form_ig: Number
    witness: tuple[int, ...]
    primary: Any = None  # single set that the bound formulas apply to, when there is one
    expected_bound: Number | None = None
    params: dict = field(default_factory=dict)

    @property
    def witness_value(self) -> Fraction:
        return sum((Fraction(a) * w for a, w in zip(self.alpha, self.witness)), Fraction(0))

    @property
    def level_bounds(self) -> tuple[float, Fraction]:
        """(relaxation value, witness value): the integer optimum lies in between."""
        lo = self.relax_value - Fraction(1, 10 ** 9) if isinstance(self.relax_value, Fraction) \
            else float(self.relax_value) - 1e-7
        return lo, self.witness_value


def _disk(center: tuple[Any, Any], r2: Any) -> QuadricSet:
    """(x - c)^T (x - c) <= r2 as a quadric with exact data."""
    c1, c2 = (Fraction(v) if not isinstance(v, float) else v for v in center)
    gamma = c1 * c1 + c2 * c2 - r2
    return QuadricSet([[1, 0], [0, 1]], [c1, c2], gamma)


PARABOLA = ([[1, 0], [0, 0]], [0, Fraction(1, 2)], 0)  # x1^2 <= x2


def _parabola() -> QuadricSet:
    return QuadricSet(*PARABOLA)


def ex0_socr(N: int) -> SocrSet:
    b1 = Fraction(8 * N + 1, 2)
    b2 = Fraction(4 * N)
    d = Fraction(4 * N) - Fraction(1, 4 * N)
    return SocrSet([[1, 0], [0, Fraction(1, 2)]], [b1, b2], [0, Fraction(1, 2)], d)


def ex0(N: int) -> FamilyInstance:
    q = socr_to_qr(ex0_socr(N))
    relax = 12 * N + Fraction(1, 2) - Fraction(5, 16 * N)
    x1 = 4 * N + Fraction(1, 2) - Fraction(1, 8 * N)
    return FamilyInstance("ex0", N, (q,), (1, 1), relax, (float(x1), float(relax - x1)),
                          N + Fraction(5, 16 * N) - Fraction(1, 2), (4 * N, 9 * N), primary=q,
                          expected_bound=Fraction(N + 1))


def ex10(N: int) -> FamilyInstance:
    s = math.sqrt(N + 0.75)
    sets = (_disk((0, 0), (N + 1) ** 2), Halfspace((1, 0), Fraction(2 * N + 1, 2)))
    return FamilyInstance("ex10", N, sets, (0, 1), -s, (N + 0.5, -s), s, (N + 1, 0))


def ex11(N: int) -> FamilyInstance:
    r2 = Fraction(N * N) + Fraction(1, 4)
    sets = (_disk((1 - N, Fraction(1, 2)), r2), _disk((N, Fraction(1, 2)), r2))
    v = 0.5 - math.sqrt(N)
    return FamilyInstance("ex11", N, sets, (0, 1), v, (0.5, v), math.sqrt(N) - 0.5, (0, 0))


def ex7(N: int) -> FamilyInstance:
    t = TwoSphereInstance(N + 1, N, 2 * N, 2, (0, 1))
    W = Fraction((N + 1) ** 2 - N * N + 4 * N * N, 4 * N)
    H = math.sqrt((4 * N + 1) * (4 * N * N - 1)) / (4 * N)
    return FamilyInstance("ex7", N, (t,), (0, 1), -H, (float(W), -H), H, (N, 0), primary=t,
                          expected_bound=Fraction(math.ceil(0.5 * math.sqrt(4 * N + 1) - 1e-9)))


def _case(N: int, R: Fraction, name: str, ig: Fraction, dinf: Fraction) -> FamilyInstance:
    c = Fraction(1, 2) + Fraction(1, N)
    q = QuadricSet([[1, 0], [0, N * N]], [0, N * N * c], N * N * c * c - R * R)
    return FamilyInstance(name, N, (q,), (0, 1), dinf, (0.0, float(dinf)), ig, (0, 1), primary=q)


def case1(N: int) -> FamilyInstance:
    if N < 3:
        raise ValueError("case1 needs N >= 3")
    return _case(N, Fraction(N, 2) - 1, "case1", 1 - Fraction(2, N), Fraction(2, N))


def case2(N: int) -> FamilyInstance:
    if N < 2:
        raise ValueError("case2 needs N >= 2")
    return _case(N, Fraction(N, 2) + 1 - Fraction(1, N), "case2", 1 - Fraction(1, N * N), Fraction(1, N * N))


def ex2(N: int, epsilon: Fraction = Fraction(1, 2)) -> FamilyInstance:
    e = Fraction(epsilon)
    sets = (_parabola(), Halfspace((1, 0), N - e))
    v = (N - e) ** 2
    return FamilyInstance("ex2", N, sets, (0, 1), v, (float(N - e), float(v)), 2 * e * N - e * e, (N, N * N),
                          params={"epsilon": e})


def ex1(N: int) -> FamilyInstance:
    sets = (_parabola(), Halfspace((1, 0), N + Fraction(1, 2)), Halfspace((-1, 0), -(N + 1)),
            Halfspace((0, -1), -(N + 1) ** 2))
    v = (N + Fraction(1, 2)) ** 2
    return FamilyInstance("ex1", N, sets, (0, 1), v, (N + 0.5, float(v)), N + Fraction(3, 4), (N + 1, (N + 1) ** 2))


def ex3(N: int) -> FamilyInstance:
    lo = (N - Fraction(1, 4)) ** 2
    sets = (_parabola(), Halfspace((1, 0), N - Fraction(1, 2)), Halfspace((-1, 0), -N),
            Halfspace((0, 1), lo), Halfspace((0, -1), -(N * N + 1)))
    return FamilyInstance("ex3", N, sets, (0, 1), lo, (N - 0.25, float(lo)), Fraction(N, 2) - Fraction(1, 16),
                          (N, N * N))


def ex4(N: int) -> FamilyInstance:
    r2 = Fraction(1, 4) + (N + Fraction(3, 4)) ** 2
    sets = (_parabola(), Halfspace((1, 0), N + Fraction(1, 4)), _disk((N + 1, (N + 1) ** 2), r2))
    v = (N + Fraction(1, 2)) ** 2
    return FamilyInstance("ex4", N, sets, (0, 1), v, (N + 0.5, float(v)), N + Fraction(3, 4), (N + 1, (N + 1) ** 2))


def ex5(N: int) -> FamilyInstance:
    c = 2 - (N + Fraction(1, 2)) ** 2
    hyper = QuadricSet([[0, Fraction(-1, 2)], [Fraction(-1, 2), 0]], [c / 2, Fraction(-N, 2)], N * c + 1,
                       ([1, 0], N))
    sets = (_parabola(), hyper, Halfspace((1, 0), N))
    v = (N + Fraction(1, 2)) ** 2
    return FamilyInstance("ex5", N, sets, (0, 1), v, (N + 0.5, float(v)), N + Fraction(3, 4), (N + 1, (N + 1) ** 2))


def ex6(N: int) -> FamilyInstance:
    """(N + 1/2 - x1) x2 >= N on the strip N - 1/2 <= x1 <= N."""
    k = N + Fraction(1, 2)
    hyper = QuadricSet([[0, Fraction(1, 2)], [Fraction(1, 2), 0]], [0, k / 2], N, ([-1, 0], -k))
    sets = (hyper, Halfspace((1, 0), N - Fraction(1, 2)), Halfspace((-1, 0), -N))
    return FamilyInstance("ex6", N, sets, (0, 1), Fraction(N), (N - 0.5, float(N)), Fraction(N), (N, 2 * N))


def ex8(N: int) -> FamilyInstance:
    s = math.sqrt(N + 0.75)
    hyper = QuadricSet([[0, -0.5], [-0.5, 0]], [s / 2, 0.0], s, ([1, 0], 0))
    sets = (_disk((-N, 0), (N + 1) ** 2), hyper, Halfspace((1, 0), 0))
    return FamilyInstance("ex8", N, sets, (0, -1), -s, (0.5, s), s, (1, 0))


def ex9(N: int) -> FamilyInstance:
    s = math.sqrt(N + 0.75)
    para = QuadricSet([[1, 0], [0, 0]], [0.75 + s, 0.5], 0.5 + 2 * s)
    sets = (_disk((-N, 0), (N + 1) ** 2), para)
    return FamilyInstance("ex9", N, sets, (0, -1), -s, (0.5, s), s, (1, 0))


FAMILIES: dict[str, Callable[..., FamilyInstance]] = {
    "ex0": ex0,
    "ex10": ex10,
    "ex11": ex11,
    "ex7": ex7,
    "case1": case1,
    "case2": case2,
    "appendix:ex1": ex1,
    "appendix:ex2": ex2,
    "appendix:ex3": ex3,
    "appendix:ex4": ex4,
    "appendix:ex5": ex5,
    "appendix:ex6": ex6,
    "appendix:ex8": ex8,
    "appendix:ex9": ex9,
}


def build(name: str, N: int, **kwargs) -> FamilyInstance:
    key = name if name in FAMILIES else f"appendix:{name}"
    if key not in FAMILIES:
        raise KeyError(f"unknown family {name!r}")
    fn = FAMILIES[key]
    if kwargs.get("epsilon") is not None and fn is ex2:
        return fn(N, kwargs["epsilon"])
    return fn(N)


def grid_scan_relaxation(inst: FamilyInstance, radius: float = 0.01, step: float = 1e-4) -> float:
    """Smallest objective over grid points near the claimed relaxation optimizer that satisfy every constraint.

    The sets are convex, so a local scan suffices to confirm the closed form:
    the result is never below the true relaxation value and is within a few
    grid steps of it.
    """
    cons = compile_sets(inst.sets)
    k = int(round(radius / step))
    ax = np.arange(-k, k + 1) * step
    xs = inst.relax_point[0] + ax
    ys = inst.relax_point[1] + ax
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    P = np.stack([X.ravel(), Y.ravel()], axis=1)
    ok = np.ones(len(P), dtype=bool)
    for con in cons:
        res = np.einsum("pi,ij,pj->p", P, con.M, P) - 2 * P @ con.b + con.c
        ok &= res <= 0
    if not ok.any():
        return math.inf
    a = np.asarray(inst.alpha, dtype=float)
    return float((P[ok] @ a).min())
