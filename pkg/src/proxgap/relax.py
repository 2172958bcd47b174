"""Closed-form continuous relaxations and the unimodular objective normalization."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import _rational as R
from .errors import (AssumptionViolated, InfeasibleSet, InvalidObjective, Unbounded, WrongQuadricClass)
from .quadric import (HYPERBOLIC, Ellipsoid, QuadricKind, QuadricSet, classify, oriented_un,
                      paraboloid_direction_exact)


class RelaxStatus(str, enum.Enum):
    SOLVABLE = "Solvable"
    BOUNDED_NOT_SOLVABLE = "BoundedNotSolvable"
    MULTIPLE_OPTIMA = "MultipleOptima"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class RelaxationResult:
    status: RelaxStatus
    value: float | None = None
    optimizer: np.ndarray | None = None
    unique: bool = False
    value_exact: Fraction | None = None
    optimizer_exact: tuple | None = None
    note: str = ""

    @property
    def solvable(self) -> bool:
        return self.status is RelaxStatus.SOLVABLE


def _alpha_vectors(alpha: Any, n: int) -> tuple[np.ndarray, R.FVec | None]:
    a_list = list(alpha.tolist() if isinstance(alpha, np.ndarray) else alpha)
    if len(a_list) != n:
        raise InvalidObjective(f"objective has length {len(a_list)}, expected {n}")
    af = np.asarray(R.to_float_array(a_list), dtype=float)
    ae = None
    if not isinstance(alpha, np.ndarray) or alpha.dtype.kind in "iuO":
        ae = R.try_exact_vec(a_list)
    elif np.all(af == np.round(af)):
        ae = tuple(Fraction(int(v)) for v in af)
    return af, ae


def solve_relaxation(S: Any, alpha: Any) -> RelaxationResult:
    """min alpha^T x over an Ellipsoid, a QuadricSet (with branch if hyperbolic) or a TwoSphereInstance."""
    if isinstance(S, Ellipsoid):
        return _solve_er(S, alpha)
    if hasattr(S, "r1") and hasattr(S, "r2"):
        from .bounds import two_sphere_relaxation
        return two_sphere_relaxation(S, alpha)
    if not isinstance(S, QuadricSet):
        raise TypeError(f"unsupported set type {type(S).__name__}")
    af, ae = _alpha_vectors(alpha, S.n)
    if not np.any(af != 0):
        return RelaxationResult(RelaxStatus.MULTIPLE_OPTIMA, 0.0, None, False, Fraction(0) if ae else None,
                                note="zero objective")
    cls = classify(S)
    kind = cls.kind
    if kind is QuadricKind.EMPTY:
        raise InfeasibleSet("the set is empty")
    if kind in (QuadricKind.CYLINDER, QuadricKind.LINE):
        raise AssumptionViolated(f"{kind.value} has a nontrivial lineality space")
    if kind is QuadricKind.ONE_SHEET_HYPERBOLOID:
        raise WrongQuadricClass("one-sheet hyperboloids are not convex")
    if kind is QuadricKind.SINGLETON:
        v = float(af @ cls.center)
        return RelaxationResult(RelaxStatus.SOLVABLE, v, cls.center, True)
    if kind is QuadricKind.ELLIPSOID:
        return _solve_ellipsoid_qr(S, af, cls)
    if kind is QuadricKind.PARABOLOID:
        return _solve_paraboloid(S, af, ae)
    if kind in HYPERBOLIC:
        return _solve_branch(S, af, ae, cls)
    raise WrongQuadricClass(kind.value)  # pragma: no cover


def _solve_er(E: Ellipsoid, alpha: Any) -> RelaxationResult:
    af, _ = _alpha_vectors(alpha, E.n)
    w = np.linalg.solve(E.Q.T, af)  # Q^-T alpha
    nw = float(np.linalg.norm(w))
    if nw == 0:
        return RelaxationResult(RelaxStatus.MULTIPLE_OPTIMA, 0.0, None, False, note="zero objective")
    x = np.linalg.solve(E.Q, E.p - E.r * w / nw)
    value = float(w @ E.p) - E.r * nw
    return RelaxationResult(RelaxStatus.SOLVABLE, value, x, E.r > 0)


def _solve_ellipsoid_qr(S: QuadricSet, af: np.ndarray, cls) -> RelaxationResult:
    y = np.linalg.solve(S.M, af)
    aMa = float(af @ y)
    qstar = float(cls.qstar_exact) if cls.qstar_exact is not None else cls.qstar
    t = math.sqrt(qstar / aMa)
    x = cls.center - t * y
    value = float(af @ cls.center) - math.sqrt(qstar * aMa)
    return RelaxationResult(RelaxStatus.SOLVABLE, value, x, True)


def _solve_paraboloid(S: QuadricSet, af: np.ndarray, ae: R.FVec | None) -> RelaxationResult:
    v_ex = paraboloid_direction_exact(S)
    if v_ex is not None and ae is not None:
        ex = S.exact
        av = R.dot(ae, v_ex)
        if av <= 0:
            return RelaxationResult(RelaxStatus.UNBOUNDED, note="alpha^T u_n <= 0")
        bv = R.dot(ex.beta, v_ex)
        phi = -bv / av
        rhs = R.vadd(ex.beta, R.vscale(phi, ae))
        x0 = R.solve_consistent(ex.M, rhs)
        res0 = ex.residual(x0)
        t = res0 / (2 * bv)
        x = R.vadd(x0, R.vscale(t, v_ex))
        val = R.dot(ae, x)
        return RelaxationResult(RelaxStatus.SOLVABLE, float(val), R.as_float(x), True, val, x)
    u = oriented_un(S, use_branch=False)
    au = float(af @ u)
    if au <= S.tau * (1 + np.linalg.norm(af)):
        return RelaxationResult(RelaxStatus.UNBOUNDED, note="alpha^T u_n <= 0")
    bu = float(S.beta @ u)
    phi = -bu / au
    x0, *_ = np.linalg.lstsq(S.M, S.beta + phi * af, rcond=None)
    t = S.residual(x0) / (2 * bu)
    x = x0 + t * u
    return RelaxationResult(RelaxStatus.SOLVABLE, float(af @ x), x, True)


def _solve_branch(S: QuadricSet, af: np.ndarray, ae: R.FVec | None, cls) -> RelaxationResult:
    if not S.has_branch:
        raise WrongQuadricClass("a hyperbolic quadric needs a branch inequality to be convex")
    ex = S.exact
    if ex is not None and ae is not None:
        y_ex = R.solve(ex.M, ae)
        aMa_ex = R.dot(ae, y_ex)
        c_ex = R.solve(ex.M, ex.beta)
        sign = (aMa_ex > 0) - (aMa_ex < 0)
        aMb = R.dot(ae, c_ex)
        y = R.as_float(y_ex)
        aMa = float(aMa_ex)
    else:
        y = np.linalg.solve(S.M, af)
        aMa = float(af @ y)
        tol = 10 * S.tau * (1 + float(af @ af))
        sign = 1 if aMa > tol else (-1 if aMa < -tol else 0)
        aMb = None
    center = cls.center
    u = oriented_un(S)
    au = float(af @ u)
    if sign > 0 or au <= 0:
        return RelaxationResult(RelaxStatus.UNBOUNDED, note="alpha^T x is unbounded below on the branch")
    base = float(aMb) if aMb is not None else float(af @ center)
    qstar = float(cls.qstar_exact) if cls.qstar_exact is not None else cls.qstar
    if sign == 0:
        if cls.kind is QuadricKind.TRANSLATED_CONE:
            return RelaxationResult(RelaxStatus.MULTIPLE_OPTIMA, base, center, False,
                                    aMb if isinstance(aMb, Fraction) else None, note="optimal ray from the apex")
        return RelaxationResult(RelaxStatus.BOUNDED_NOT_SOLVABLE, base, None, False,
                                aMb if isinstance(aMb, Fraction) else None, note="infimum approached along an asymptote")
    if cls.kind is QuadricKind.TRANSLATED_CONE:
        return RelaxationResult(RelaxStatus.SOLVABLE, base, center, True,
                                aMb if isinstance(aMb, Fraction) else None)
    s = math.sqrt(qstar / aMa)
    x = center - s * y
    value = base + math.sqrt(qstar * aMa)
    return RelaxationResult(RelaxStatus.SOLVABLE, value, x, True)


# ---------------------------------------------------------------------------
# objective normalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedInstance:
    U: np.ndarray
    set: QuadricSet
    scale: Fraction
    primitive: tuple[int, ...] = field(default=())

    def to_original(self, y: Any) -> np.ndarray:
        return self.U @ np.asarray(y)


def _extgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s a + t b = g >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def primitive_objective(alpha: Any) -> tuple[tuple[int, ...], Fraction]:
    """Write alpha = scale * a with a a primitive integer vector and scale > 0 rational."""
    a_list = list(alpha.tolist() if isinstance(alpha, np.ndarray) else alpha)
    fr = []
    for v in a_list:
        x = R.parse_scalar(v)
        if isinstance(x, float):
            if x != round(x):
                raise InvalidObjective("objective entries must be rational")
            x = Fraction(int(round(x)))
        fr.append(x)
    if all(v == 0 for v in fr):
        raise InvalidObjective("objective must be nonzero")
    L = R.lcm_of_denominators(fr)
    ints = [int(v * L) for v in fr]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return tuple(v // g for v in ints), Fraction(g, L)


def unimodular_to_last(a: tuple[int, ...]) -> np.ndarray:
    """Integer W with |det W| = 1 and W a = e_n, built by pairwise extended gcd steps."""
    n = len(a)
    W = [[int(i == j) for j in range(n)] for i in range(n)]
    v = list(a)
    last = n - 1
    for i in range(n - 1):
        if v[i] == 0:
            continue
        g, s, t = _extgcd(v[i], v[last])
        # rows (i, last) <- [[v_last/g, -v_i/g], [s, t]] (rows i, last)
        p, q = v[last] // g, -v[i] // g
        Wi, Wl = W[i], W[last]
        W[i] = [p * x + q * y for x, y in zip(Wi, Wl)]
        W[last] = [s * x + t * y for x, y in zip(Wi, Wl)]
        v[i], v[last] = 0, g
    if v[last] == -1:
        W[last] = [-x for x in W[last]]
        v[last] = 1
    if v[last] != 1:
        raise InvalidObjective("objective is not primitive")
    return np.array(W, dtype=np.int64)


def normalize_objective(S: QuadricSet, alpha: Any) -> NormalizedInstance:
    """Unimodular U with U^T (alpha/scale) = e_n; the returned set lives in y-coordinates, x = U y."""
    a, scale = primitive_objective(alpha)
    if len(a) != S.n:
        raise InvalidObjective(f"objective has length {len(a)}, expected {S.n}")
    W = unimodular_to_last(a)
    U = W.T.copy()
    return NormalizedInstance(U, S.transformed(U), scale, a)


# ---------------------------------------------------------------------------
# slices x_n = delta of a normalized set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SliceQuadratic:
    """Block data M = [[Mbar, a], [a^T, a0]], beta = (bbar, bn) and r^2(delta) = q2 d^2 + q1 d + q0."""

    Mbar: np.ndarray
    a: np.ndarray
    a0: float
    bbar: np.ndarray
    bn: float
    q2: float | Fraction
    q1: float | Fraction
    q0: float | Fraction
    exact: bool

    def r2(self, delta: float) -> float:
        return float(self.q2) * delta * delta + float(self.q1) * delta + float(self.q0)

    def center(self, delta: float) -> np.ndarray:
        """Center of the slice ellipsoid {xbar : (xbar - c)^T Mbar (xbar - c) <= r^2(delta)}."""
        return np.linalg.solve(self.Mbar, self.bbar - delta * self.a)


def slice_quadratic(S: QuadricSet) -> SliceQuadratic:
    n = S.n
    ex = S.exact
    if n == 1:
        m = S.exact.M[0][0] if ex else S.M[0, 0]
        b = ex.beta[0] if ex else S.beta[0]
        g = ex.gamma if ex else S.gamma
        # no transverse coordinates: "r^2" is minus the residual at delta
        return SliceQuadratic(np.zeros((0, 0)), np.zeros(0), float(m), np.zeros(0), float(b), -m, 2 * b, -g,
                              ex is not None)
    if ex is not None:
        Mb = tuple(row[:-1] for row in ex.M[:-1])
        a = tuple(row[-1] for row in ex.M[:-1])
        a0 = ex.M[-1][-1]
        bb, bn = ex.beta[:-1], ex.beta[-1]
        if not R.is_positive_definite(Mb):
            raise AssumptionViolated("the leading (n-1) block of M is not positive definite")
        Ma = R.solve(Mb, a)
        Mbb = R.solve(Mb, bb)
        q2 = R.dot(a, Ma) - a0
        q1 = 2 * (bn - R.dot(bb, Ma))
        q0 = R.dot(bb, Mbb) - ex.gamma
        return SliceQuadratic(R.as_float(Mb), R.as_float(a), float(a0), R.as_float(bb), float(bn), q2, q1, q0, True)
    Mb = S.M[:-1, :-1]
    a = S.M[:-1, -1]
    a0 = float(S.M[-1, -1])
    bb, bn = S.beta[:-1], float(S.beta[-1])
    if np.linalg.eigvalsh(Mb).min() <= S.tau:
        raise AssumptionViolated("the leading (n-1) block of M is not positive definite")
    Ma = np.linalg.solve(Mb, a)
    Mbb = np.linalg.solve(Mb, bb)
    q2 = float(a @ Ma - a0)
    q1 = float(2 * (bn - bb @ Ma))
    q0 = float(bb @ Mbb - S.gamma)
    return SliceQuadratic(Mb, a, a0, bb, bn, q2, q1, q0, False)


def _sqrt(x: float | Fraction) -> float:
    return R.sqrt_float(x) if isinstance(x, Fraction) else math.sqrt(x)


def delta_inf(S: QuadricSet) -> tuple[float, bool]:
    """inf{x_n : x in S} for a set already normalized to the objective e_n, and whether it is attained uniquely."""
    cls = classify(S)
    kind = cls.kind
    if kind is QuadricKind.EMPTY:
        raise InfeasibleSet("the set is empty")
    if kind not in (QuadricKind.ELLIPSOID, QuadricKind.SINGLETON, QuadricKind.PARABOLOID) + HYPERBOLIC:
        raise WrongQuadricClass(f"delta_inf is not defined for {kind.value}")
    en = [0] * (S.n - 1) + [1]
    if kind in HYPERBOLIC:
        rel = solve_relaxation(S, en)
        if rel.status is RelaxStatus.UNBOUNDED:
            raise Unbounded("x_n is unbounded below on the branch")
        if rel.status in (RelaxStatus.BOUNDED_NOT_SOLVABLE, RelaxStatus.MULTIPLE_OPTIMA):
            return float(rel.value), False
        if kind is QuadricKind.TRANSLATED_CONE:
            return float(rel.value), True
    if kind is QuadricKind.SINGLETON:
        return float(cls.center[-1]), True
    sq = slice_quadratic(S)
    q2, q1, q0 = sq.q2, sq.q1, sq.q0
    if kind is QuadricKind.PARABOLOID:
        if q1 <= 0 or (not sq.exact and abs(float(q2)) > 1e-9 * (1 + abs(float(q1)))):
            raise Unbounded("x_n is unbounded below on the paraboloid")
        return float(-q0 / q1), True
    D = q1 * q1 - 4 * q2 * q0
    root = (-q1 + _sqrt(max(D, 0))) / (2 * q2) if not isinstance(D, Fraction) else \
        (-float(q1) + R.sqrt_float(max(D, Fraction(0)))) / (2 * float(q2))
    return float(root), True


def delta_inf_exact(S: QuadricSet) -> Fraction | None:
    """Exact delta_inf for rational paraboloids (it is -q0/q1), else None."""
    if S.exact is None:
        return None
    try:
        if classify(S).kind is not QuadricKind.PARABOLOID:
            return None
    except Exception:
        return None
    sq = slice_quadratic(S)
    if not sq.exact or sq.q1 <= 0:
        return None
    return -sq.q0 / sq.q1
