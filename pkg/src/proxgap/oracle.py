"""Brute-force ground truth for small integer programs over quadratic sets.

Every input set is compiled to quadratic constraints

    x^T M x - 2 b^T x + c <= 0

(a half-space g^T x >= h is M = 0, b = g/2, c = h).  Integer points are then
enumerated either in an axis box derived from bounded constraints, axis
half-spaces and known objective levels, or slice by slice along the
objective of an unbounded driver set.  Points whose residual lies within a
rounding band of zero are re-checked in exact rational arithmetic whenever
the data is rational.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Sequence

import numpy as np

from . import _kernels
from . import _rational as R
from .bounds import TwoSphereInstance, ig_bound_slice
from .errors import (AssumptionViolated, BudgetExceeded, CannotCertifyBox, InfeasibleIntegerSet, InfeasibleSet, InvalidObjective,
                     Unbounded, WrongQuadricClass)
from .quadric import HYPERBOLIC, Ellipsoid, QuadricKind, QuadricSet, SocrSet, classify, socr_to_qr
from .relax import delta_inf, normalize_objective, slice_quadratic

DEFAULT_BUDGET = 10_000_000
CHUNK = 1 << 16
ABS_TOL = 1e-9
BOX_INFLATE = 1e-7


def enumeration_budget() -> int:
    raw = os.environ.get("PROX_ORACLE_BUDGET")
    if raw:
        try:
            return max(1, int(float(raw)))
        except ValueError:
            pass
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class Halfspace:
    """g^T x >= h."""

    g: tuple
    h: Any

    def contains(self, x: Any, tol: float = ABS_TOL) -> bool:
        gf = np.asarray(R.to_float_array(list(self.g)), dtype=float)
        return float(gf @ np.asarray(x, dtype=float)) >= float(R.parse_scalar(self.h)) - tol


@dataclass(frozen=True)
class IntegerBox:
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(max(0, h - l + 1) for l, h in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def inflated(self, k: int) -> "IntegerBox":
        return IntegerBox(tuple(v - k for v in self.lo), tuple(v + k for v in self.hi))

    def __str__(self) -> str:
        return " x ".join(f"[{l},{h}]" for l, h in zip(self.lo, self.hi))


class IpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    BOX_TRUNCATED = "BoxTruncated"


@dataclass(frozen=True)
class IpSolution:
    status: IpStatus
    value: Fraction | float | None
    optimizer: tuple[int, ...] | None
    points_enumerated: int
    box: IntegerBox | None
    certificate: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is IpStatus.OPTIMAL


@dataclass(frozen=True)
class ProximityResult:
    point: tuple[int, ...]
    distance: float
    points_enumerated: int = 0

    def __iter__(self) -> Iterator[Any]:
        yield self.point
        yield self.distance


# ---------------------------------------------------------------------------
# compilation to quadratic constraints
# ---------------------------------------------------------------------------


@dataclass
class _Con:
    M: np.ndarray
    b: np.ndarray
    c: float
    exact: tuple | None  # (M, b, c) as Fractions
    label: str = ""

    def transformed(self, U: np.ndarray) -> "_Con":
        Uf = U.astype(float)
        ex = None
        if self.exact is not None:
            Ue = tuple(tuple(Fraction(int(v)) for v in row) for row in U)
            Ut = R.transpose(Ue)
            ex = (R.matmul(R.matmul(Ut, self.exact[0]), Ue), R.matvec(Ut, self.exact[1]), self.exact[2])
        return _Con(Uf.T @ self.M @ Uf, Uf.T @ self.b, self.c, ex, self.label)

    def exact_residual(self, x: Sequence[int]) -> Fraction:
        M, b, c = self.exact
        xf = tuple(Fraction(int(v)) for v in x)
        return R.quad(M, xf) - 2 * R.dot(b, xf) + c

    @property
    def scale(self) -> float:
        return max(float(np.abs(self.M).max(initial=0.0)), float(np.abs(self.b).max(initial=0.0)), abs(self.c), 1.0)


def _quadric_cons(q: QuadricSet, label: str) -> list[_Con]:
    ex = q.exact
    out = [_Con(q.M.copy(), q.beta.copy(), q.gamma, (ex.M, ex.beta, ex.gamma) if ex else None, label)]
    if q.has_branch:
        n = q.n
        zero = R.zeros(n, n)
        hex_ = (zero, tuple(v / 2 for v in ex.g), ex.h) if (ex and ex.g is not None) else None
        out.append(_Con(np.zeros((n, n)), q.g / 2, float(q.h), hex_, label + ":branch"))
    return out


def _ellipsoid_con(e: Ellipsoid, label: str) -> _Con:
    if e.exact is not None:
        ex = e.exact
        return _Con(R.as_float(ex.M), R.as_float(ex.beta), float(ex.gamma), (ex.M, ex.beta, ex.gamma), label)
    return _Con(e.Q.T @ e.Q, e.Q.T @ e.p, float(e.p @ e.p - e.r ** 2), None, label)


def compile_sets(sets: Sequence[Any]) -> list[_Con]:
    cons: list[_Con] = []
    for i, s in enumerate(sets):
        label = f"set{i}"
        if isinstance(s, QuadricSet):
            cons += _quadric_cons(s, label)
        elif isinstance(s, SocrSet):
            cons += _quadric_cons(socr_to_qr(s), label)
        elif isinstance(s, Ellipsoid):
            cons.append(_ellipsoid_con(s, label))
        elif isinstance(s, TwoSphereInstance):
            b1, b2 = s.balls()
            cons += [_ellipsoid_con(b1, label + ":ball1"), _ellipsoid_con(b2, label + ":ball2")]
        elif isinstance(s, Halfspace):
            g_l = list(s.g)
            n = len(g_l)
            gf = np.asarray(R.to_float_array(g_l), dtype=float)
            ge = R.try_exact_vec(g_l)
            he = R.try_exact_scalar(s.h)
            ex = (R.zeros(n, n), tuple(v / 2 for v in ge), he) if (ge is not None and he is not None) else None
            cons.append(_Con(np.zeros((n, n)), gf / 2, float(R.parse_scalar(s.h)), ex, label))
        else:
            raise TypeError(f"unsupported set type {type(s).__name__}")
    dims = {c.M.shape[0] for c in cons}
    if len(dims) != 1:
        raise ValueError("all sets must live in the same dimension")
    return cons


# ---------------------------------------------------------------------------
# box derivation
# ---------------------------------------------------------------------------


def _bounded_box(con: _Con) -> tuple[np.ndarray, np.ndarray] | None:
    """Axis box of a constraint with positive definite M; raises InfeasibleSet when it is empty."""
    if not np.any(con.M):
        return None
    w = np.linalg.eigvalsh(con.M)
    if w.min() <= 1e-9 * (1 + abs(w).max()):
        return None
    if con.exact is not None:
        M, b, c = con.exact
        ctr = R.solve(M, b)
        qs = R.dot(b, ctr) - c
        if qs < 0:
            raise InfeasibleSet("a bounded constraint is empty")
        Minv = R.inverse(M)
        center = R.as_float(ctr)
        half = np.array([R.sqrt_float(qs * Minv[i][i]) for i in range(len(M))])
    else:
        center = np.linalg.solve(con.M, con.b)
        qs = float(con.b @ center - con.c)
        if qs < -ABS_TOL:
            raise InfeasibleSet("a bounded constraint is empty")
        half = np.sqrt(max(qs, 0.0) * np.diag(np.linalg.inv(con.M)))
    return center - half, center + half


def _axis_index(v: np.ndarray) -> tuple[int, float] | None:
    nz = np.flatnonzero(v)
    if len(nz) != 1:
        return None
    return int(nz[0]), float(v[nz[0]])


def derive_box(cons: list[_Con], alpha: np.ndarray | None = None,
               level_bounds: tuple[Any, Any] | None = None) -> IntegerBox | None:
    n = cons[0].M.shape[0]
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    for con in cons:
        bb = _bounded_box(con)
        if bb is not None:
            lo, hi = np.maximum(lo, bb[0]), np.minimum(hi, bb[1])
            continue
        if not np.any(con.M):
            ax = _axis_index(con.b)
            if ax is not None:
                i, gi = ax  # g_i x_i >= h with g_i = 2 b_i
                t = con.c / (2 * gi)
                if gi > 0:
                    lo[i] = max(lo[i], t)
                else:
                    hi[i] = min(hi[i], t)
    if alpha is not None and level_bounds is not None:
        ax = _axis_index(np.asarray(alpha, dtype=float))
        if ax is not None:
            i, ai = ax
            llo, lhi = level_bounds
            # llo <= ai x_i <= lhi, either side may be missing
            ends = (None if llo is None else float(llo) / ai, None if lhi is None else float(lhi) / ai)
            if ai < 0:
                ends = ends[::-1]
            a_lo = -np.inf if ends[0] is None else ends[0]
            a_hi = np.inf if ends[1] is None else ends[1]
            lo[i], hi[i] = max(lo[i], a_lo), min(hi[i], a_hi)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        return None
    ilo = np.ceil(lo - BOX_INFLATE).astype(np.int64)
    ihi = np.floor(hi + BOX_INFLATE).astype(np.int64)
    return IntegerBox(tuple(int(v) for v in ilo), tuple(int(v) for v in ihi))


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def take(self, k: int) -> int:
        k = min(k, self.limit - self.used)
        self.used += max(k, 0)
        return max(k, 0)

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit


def _stack(cons: list[_Con]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return (np.stack([c.M for c in cons]), np.stack([c.b for c in cons]), np.array([c.c for c in cons]))


def _feasible_rows(cons: list[_Con], P: np.ndarray, res: np.ndarray) -> np.ndarray:
    """Mask of feasible rows; near-boundary rows are settled exactly when the data allows."""
    X = float(np.abs(P).max(initial=0)) + 1.0
    n = P.shape[1]
    band = np.array([ABS_TOL + 1e-13 * c.scale * (n * X) ** 2 for c in cons])
    strict_in = np.all(res <= -band, axis=1)
    out = np.any(res > band, axis=1)
    amb = np.flatnonzero(~strict_in & ~out)
    ok = strict_in.copy()
    for r in amb:
        good = True
        for k, con in enumerate(cons):
            v = res[r, k]
            if v <= -band[k]:
                continue
            if con.exact is not None:
                if con.exact_residual(P[r]) > 0:
                    good = False
                    break
            elif v > ABS_TOL:
                good = False
                break
        ok[r] = good
    return ok


def _iter_feasible(cons: list[_Con], lo: np.ndarray, dims: np.ndarray, budget: _Budget):
    """Yield blocks of feasible integer points of the box in row-major order."""
    Ms, bs, cs = _stack(cons)
    total = int(np.prod(dims)) if len(dims) else 0
    start = 0
    while start < total:
        want = min(CHUNK, total - start)
        count = budget.take(want)
        if count == 0:
            return
        P = _kernels.box_point_block(lo, dims, start, count)
        res = _kernels.box_residuals(lo, dims, start, count, Ms, bs, cs)
        mask = _feasible_rows(cons, P, res)
        if mask.any():
            yield P[mask]
        start += count
        if count < want:
            return


def _best_in(P: np.ndarray, af: np.ndarray, ae: tuple | None, X: np.ndarray | None = None):
    """Best row by objective then lexicographic order of X (defaults to P itself)."""
    X = P if X is None else X
    vals = P.astype(float) @ af
    m = vals.min()
    near = np.flatnonzero(vals <= m + 1e-9 * (1 + abs(m)))
    if ae is not None:
        exact_vals = [sum((a * int(v) for a, v in zip(ae, P[i])), Fraction(0)) for i in near]
        best = min(exact_vals)
        near = [i for i, v in zip(near, exact_vals) if v == best]
        value: Fraction | float = best
    else:
        value = float(m)
    i = min(near, key=lambda r: tuple(int(v) for v in X[r]))
    return value, tuple(int(v) for v in X[i])


def _better(v1, x1, v2, x2) -> bool:
    if v2 is None:
        return True
    if v1 != v2:
        return v1 < v2
    return x1 < x2


def _alpha(alpha: Any, n: int) -> tuple[np.ndarray, tuple | None]:
    a_list = list(alpha.tolist() if isinstance(alpha, np.ndarray) else alpha)
    if len(a_list) != n:
        raise InvalidObjective(f"objective has length {len(a_list)}, expected {n}")
    af = np.asarray(R.to_float_array(a_list), dtype=float)
    ae = R.try_exact_vec(a_list) if not isinstance(alpha, np.ndarray) or alpha.dtype.kind in "iuO" else None
    if ae is None and np.all(af == np.round(af)):
        ae = tuple(Fraction(int(v)) for v in af)
    return af, ae


def _enumerate_box(cons, box: IntegerBox, af, ae, budget: _Budget, certificate: str) -> IpSolution:
    lo = np.array(box.lo, dtype=np.int64)
    dims = np.array(box.dims, dtype=np.int64)
    best_v, best_x = None, None
    if box.size > 0:
        for P in _iter_feasible(cons, lo, dims, budget):
            v, x = _best_in(P, af, ae)
            if _better(v, x, best_v, best_x):
                best_v, best_x = v, x
    if budget.used < box.size:
        return IpSolution(IpStatus.BOX_TRUNCATED, best_v, best_x, budget.used, box,
                          f"budget of {budget.limit} points exhausted; incumbent is partial")
    if best_x is None:
        return IpSolution(IpStatus.INFEASIBLE, None, None, budget.used, box, certificate + "; no feasible point")
    return IpSolution(IpStatus.OPTIMAL, best_v, best_x, budget.used, box, certificate)


def _driver(sets: Sequence[Any]) -> QuadricSet | None:
    for s in sets:
        q = socr_to_qr(s) if isinstance(s, SocrSet) else s
        if isinstance(q, QuadricSet):
            try:
                kind = classify(q).kind
            except Exception:
                continue
            if kind is QuadricKind.PARABOLOID or kind in HYPERBOLIC:
                return q
    return None


def solve_ip_exact(sets: Sequence[Any], alpha: Any, *, level_bounds: tuple[Any, Any] | None = None,
                   box: IntegerBox | None = None, inflate: int = 0, budget: int | None = None) -> IpSolution:
    """min alpha^T x over the integer points of the intersection of ``sets``.

    ``level_bounds`` = (lo, hi) are known bounds on the optimal value (lo may be
    the relaxation value, hi the value of any feasible integer point); they
    close the box along the objective when it is an axis direction and cap the
    slice search otherwise.
    """
    if not isinstance(sets, (list, tuple)):
        sets = [sets]
    cons = compile_sets(sets)
    n = cons[0].M.shape[0]
    af, ae = _alpha(alpha, n)
    bud = _Budget(budget if budget is not None else enumeration_budget())
    if box is None:
        try:
            box = derive_box(cons, af, level_bounds)
        except InfeasibleSet:
            return IpSolution(IpStatus.INFEASIBLE, None, None, 0, None, "a bounded constraint is empty")
        cert = "axis box from bounded constraints, axis half-spaces and objective levels"
    else:
        cert = "box supplied by caller"
    if box is not None:
        if inflate:
            box = box.inflated(inflate)
            cert += f", inflated by {inflate}"
        return _enumerate_box(cons, box, af, ae, bud, cert)
    return _solve_by_slices(sets, cons, af, ae, level_bounds, bud, inflate)


def _solve_by_slices(sets, cons, af, ae, level_bounds, bud: _Budget, inflate: int) -> IpSolution:
    drv = _driver(sets)
    if drv is None or ae is None:
        raise CannotCertifyBox("no bounded set, no axis box and no slice driver")
    try:
        ni = normalize_objective(drv, list(ae))
        sq = slice_quadratic(ni.set)
        dinf, unique = delta_inf(ni.set)
    except (AssumptionViolated, Unbounded, WrongQuadricClass, InvalidObjective) as exc:
        raise CannotCertifyBox(f"slice enumeration unavailable: {exc}") from exc
    if not unique:
        raise CannotCertifyBox("the driver has no bounded slices along the objective")
    scale = ni.scale
    hi_level = None if level_bounds is None else level_bounds[1]
    if hi_level is not None:
        cap = float(R.parse_scalar(hi_level)) / float(scale)
        cert = "slices up to the supplied objective level"
    else:
        n_sets = len(sets)
        if n_sets > 1:
            raise CannotCertifyBox("an intersection without a known feasible level cannot be capped")
        try:
            ig = min(r.value for r in ig_bound_slice(ni.set))
        except Exception as exc:
            raise CannotCertifyBox(f"no IG bound available to cap the slices: {exc}") from exc
        cap = dinf + ig + 5
        cert = "slices up to delta_inf + IG bound + 5"
    start = math.ceil(dinf - 1e-9)
    if level_bounds is not None and level_bounds[0] is not None:
        start = max(start, math.ceil(float(R.parse_scalar(level_bounds[0])) / float(scale) - 1e-9))
    stop = math.floor(cap + 1e-9) + inflate
    U = ni.U
    tcons = [c.transformed(U) for c in cons]
    Minv_diag = np.diag(np.linalg.inv(sq.Mbar)) if sq.Mbar.size else np.zeros(0)
    nb = len(Minv_diag)
    for delta in range(start, stop + 1):
        r2 = sq.r2(delta)
        if r2 < -1e-9 * (1 + abs(delta)) ** 2:
            continue
        ctr = sq.center(delta) if nb else np.zeros(0)
        half = np.sqrt(max(r2, 0.0) * Minv_diag) + BOX_INFLATE
        lo = np.concatenate([np.ceil(ctr - half), [delta]]).astype(np.int64)
        hi = np.concatenate([np.floor(ctr + half), [delta]]).astype(np.int64)
        dims = np.maximum(hi - lo + 1, 0)
        if np.any(dims == 0):
            continue
        best = None
        for Y in _iter_feasible(tcons, lo, dims, bud):
            X = Y @ U.T
            cand = min(tuple(int(v) for v in row) for row in X)
            if best is None or cand < best:
                best = cand
        if bud.exhausted and best is None:
            return IpSolution(IpStatus.BOX_TRUNCATED, None, None, bud.used, None,
                              f"budget exhausted at slice {delta}")
        if best is not None:
            value = scale * delta if isinstance(scale, Fraction) else float(scale) * delta
            if ae is not None:
                value = sum((a * v for a, v in zip(ae, best)), Fraction(0))
            return IpSolution(IpStatus.OPTIMAL, value, best, bud.used, None,
                              cert + f"; first feasible slice {delta}")
    return IpSolution(IpStatus.INFEASIBLE, None, None, bud.used, None, cert + f"; no integer point up to slice {stop}")


# ---------------------------------------------------------------------------
# proximity
# ---------------------------------------------------------------------------


def proximity_exact(sets: Sequence[Any], xhat: Any, *, radius_cap: float | None = None,
                    budget: int | None = None) -> ProximityResult:
    """Nearest feasible integer point to ``xhat`` (Euclidean, lexicographic ties).

    The search radius doubles from 1 until a feasible point at distance at
    most the radius turns up; ``radius_cap`` (a proximity bound plus slack)
    or a bounded constraint makes the search finite.
    """
    if not isinstance(sets, (list, tuple)):
        sets = [sets]
    cons = compile_sets(sets)
    n = cons[0].M.shape[0]
    xh = np.asarray(R.to_float_array(list(xhat)), dtype=float)
    try:
        outer = derive_box(cons)
    except InfeasibleSet:
        raise InfeasibleIntegerSet("a bounded constraint is empty")
    if outer is None and radius_cap is None:
        raise CannotCertifyBox("unbounded set and no proximity cap")
    bud = _Budget(budget if budget is not None else enumeration_budget())
    rho = 1.0
    while True:
        lo = np.ceil(xh - rho - BOX_INFLATE).astype(np.int64)
        hi = np.floor(xh + rho + BOX_INFLATE).astype(np.int64)
        covers_outer = False
        if outer is not None:
            olo, ohi = np.array(outer.lo), np.array(outer.hi)
            covers_outer = bool(np.all(lo <= olo) and np.all(hi >= ohi))
            lo, hi = np.maximum(lo, olo), np.minimum(hi, ohi)
        dims = np.maximum(hi - lo + 1, 0)
        best_d, best_x = None, None
        if np.all(dims > 0):
            for P in _iter_feasible(cons, lo, dims, bud):
                d2 = ((P - xh) ** 2).sum(axis=1)
                m = d2.min()
                near = np.flatnonzero(d2 <= m + 1e-12 * (1 + m))
                x = min(tuple(int(v) for v in P[i]) for i in near)
                if best_d is None or m < best_d - 1e-12 * (1 + m) or (abs(m - best_d) <= 1e-12 * (1 + m) and x < best_x):
                    best_d, best_x = float(m), x
        if bud.exhausted:
            raise BudgetExceeded(f"budget of {bud.limit} points exhausted during the proximity search")
        if best_d is not None and math.sqrt(best_d) <= rho + 1e-12:
            return ProximityResult(best_x, math.sqrt(best_d), bud.used)
        if covers_outer:
            if best_d is not None:
                return ProximityResult(best_x, math.sqrt(best_d), bud.used)
            raise InfeasibleIntegerSet("no feasible integer point in the bounded region")
        if radius_cap is not None and rho >= radius_cap:
            if best_d is not None and math.sqrt(best_d) <= radius_cap:
                return ProximityResult(best_x, math.sqrt(best_d), bud.used)
            raise InfeasibleIntegerSet(f"no feasible integer point within distance {radius_cap}")
        rho = rho * 2 if radius_cap is None else min(rho * 2, radius_cap)
