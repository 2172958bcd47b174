"""Proximity and integrality-gap bounds.

Every public bound function returns a ``BoundReport``.  Formula ids are
stable strings (``prox.ellipsoid``, ``ig.slice.paraboloid.weak``, ...) that the
CLI prints and the tests key on.  Bounds that need the covering radius use the
certified upper end of the bracket from :mod:`proxgap.lattice`; every formula is
nondecreasing in mu, so this keeps them valid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import _rational as R
from .errors import (AssumptionViolated, BoundNotApplicable, InfeasibleIntegerSet, InfeasibleSet,
                     NoFullDimRecessionCone, WrongQuadricClass)
from .lattice import CoveringRadius, CoverMethod, MixedLattice, covering_radius_from_gram, \
    ellipsoid_contains_lattice_point
from .quadric import (HYPERBOLIC, Ellipsoid, QuadricKind, QuadricSet, ball_shift, classify, oriented_un,
                      psi_constant, qr_to_er)
from .relax import (RelaxationResult, RelaxStatus, SliceQuadratic, delta_inf, normalize_objective, slice_quadratic,
                    solve_relaxation)

CEIL_NUDGE = 1e-9


class BoundKind(str, enum.Enum):
    PROXIMITY = "Proximity"
    INTEGRALITY_GAP = "IntegralityGap"


@dataclass(frozen=True)
class BoundReport:
    kind: BoundKind
    value: float
    formula: str
    rhs_independent: bool
    mu_used: CoveringRadius | None = None
    assumptions: tuple[str, ...] = ()
    value_exact: Fraction | None = None
    details: dict = field(default_factory=dict, compare=False)

    def scaled(self, s: Fraction | float) -> "BoundReport":
        ve = self.value_exact * s if (self.value_exact is not None and isinstance(s, Fraction)) else None
        return BoundReport(self.kind, self.value * float(s), self.formula, self.rhs_independent, self.mu_used,
                           self.assumptions, ve, dict(self.details))


def ceil_safe(x: float | Fraction) -> int:
    """Ceiling that forgives floating-point noise just above an integer."""
    if isinstance(x, Fraction):
        return R.ceil_frac(x)
    return math.ceil(x - CEIL_NUDGE)


def _mu_of_gram(G: Any) -> CoveringRadius:
    return covering_radius_from_gram(G)


def zn_covering_radius(n: int) -> CoveringRadius:
    sq = Fraction(n, 4)
    v = R.sqrt_float(sq)
    return CoveringRadius(v, v, True, CoverMethod.ORTHOGONAL_BOX, sq)


# ---------------------------------------------------------------------------
# full-dimensional recession cones
# ---------------------------------------------------------------------------


def _require_branch(q: QuadricSet) -> None:
    cls = classify(q)
    if cls.kind not in HYPERBOLIC:
        raise WrongQuadricClass(f"needs a cone or two-sheet hyperboloid branch, got {cls.kind.value}")
    if not q.has_branch:
        raise WrongQuadricClass("a branch inequality is required")


def _cone_prox_value(q: QuadricSet) -> tuple[float, float]:
    psi = psi_constant(q)
    return math.sqrt(q.n) / 2 * (1 / psi + 1), psi


def prox_bound_full_dim_cone(q: QuadricSet) -> BoundReport:
    """Prox <= (sqrt(n)/2)(1/Psi + 1): a ball of radius sqrt(n)/2 fits at depth sqrt(n)/(2 Psi) along the axis."""
    if q.lambda_n >= -q.tau:
        raise NoFullDimRecessionCone("the recession cone is not full-dimensional")
    _require_branch(q)
    v, psi = _cone_prox_value(q)
    return BoundReport(BoundKind.PROXIMITY, v, "prox.full-dim-cone", True, zn_covering_radius(q.n),
                       ("regular recession cone",), details={"psi": psi})


def ig_bound_full_dim_cone(q: QuadricSet, alpha: Any) -> BoundReport:
    rep = prox_bound_full_dim_cone(q)
    na = float(np.linalg.norm(np.asarray(R.to_float_array(list(alpha)), dtype=float)))
    return BoundReport(BoundKind.INTEGRALITY_GAP, na * rep.value, "ig.full-dim-cone", True, rep.mu_used,
                       rep.assumptions + ("relaxation bounded below",), details=dict(rep.details))


def prox_bound_hyperboloid(q: QuadricSet) -> BoundReport:
    _require_branch(q)
    v, psi = _cone_prox_value(q)
    return BoundReport(BoundKind.PROXIMITY, v, "prox.hyperboloid", True, zn_covering_radius(q.n),
                       ("valid branch",), details={"psi": psi})


def ig_bound_hyperboloid(q: QuadricSet, alpha: Any) -> BoundReport:
    rep = prox_bound_hyperboloid(q)
    na = float(np.linalg.norm(np.asarray(R.to_float_array(list(alpha)), dtype=float)))
    return BoundReport(BoundKind.INTEGRALITY_GAP, na * rep.value, "ig.hyperboloid", True, rep.mu_used,
                       rep.assumptions + ("relaxation bounded below",), details=dict(rep.details))


# ---------------------------------------------------------------------------
# ellipsoids
# ---------------------------------------------------------------------------


def _as_er(e: Ellipsoid | QuadricSet) -> Ellipsoid:
    if isinstance(e, QuadricSet):
        return qr_to_er(e)
    return e


def ellipsoid_mu(e: Ellipsoid) -> CoveringRadius:
    """Covering radius of the lattice Q Z^n; the Gram matrix is M = Q^T Q."""
    if e.exact is not None:
        return _mu_of_gram(e.exact.M)
    return _mu_of_gram(e.gram)


def _check_integer_point(e: Ellipsoid) -> None:
    res = ellipsoid_contains_lattice_point(MixedLattice(e.Q), e.p, e.r)
    if not res.contains:
        raise InfeasibleIntegerSet("the ellipsoid contains no integer point")


def prox_bound_ellipsoid(e: Ellipsoid | QuadricSet, check_feasible: bool = True) -> BoundReport:
    """Prox <= 2 ||Q^-T||_2 mu(Q)."""
    e = _as_er(e)
    if check_feasible:
        _check_integer_point(e)
    mu = ellipsoid_mu(e)
    norm = float(np.linalg.norm(np.linalg.inv(e.Q), 2))
    return BoundReport(BoundKind.PROXIMITY, 2 * norm * mu.upper, "prox.ellipsoid", True, mu,
                       ("integer point exists",))


def ig_bound_ellipsoid(e: Ellipsoid | QuadricSet, alpha: Any, check_feasible: bool = True) -> BoundReport:
    """IG <= 2 ||Q^-T alpha||_2 mu(Q)."""
    e = _as_er(e)
    if check_feasible:
        _check_integer_point(e)
    mu = ellipsoid_mu(e)
    af = np.asarray(R.to_float_array(list(alpha)), dtype=float)
    w = np.linalg.solve(e.Q.T, af)
    v = 2 * float(np.linalg.norm(w)) * mu.upper
    return BoundReport(BoundKind.INTEGRALITY_GAP, v, "ig.ellipsoid", True, mu, ("integer point exists",))


# ---------------------------------------------------------------------------
# paraboloids
# ---------------------------------------------------------------------------


def _require_paraboloid(q: QuadricSet) -> None:
    kind = classify(q).kind
    if kind is not QuadricKind.PARABOLOID:
        raise WrongQuadricClass(f"needs a paraboloid, got {kind.value}")


def prox_bound_paraboloid_theta(q: QuadricSet, xhat: Any) -> BoundReport:
    """Prox <= sqrt(n)/2 + Theta_0(xhat, sqrt(n)/2)."""
    _require_paraboloid(q)
    r = math.sqrt(q.n) / 2
    theta, u = ball_shift(q, xhat, r)
    return BoundReport(BoundKind.PROXIMITY, r + theta, "prox.paraboloid.theta-relaxed", False,
                       zn_covering_radius(q.n), ("xhat on the boundary",), details={"theta": theta})


def large_tangent(q: QuadricSet, xhat: Any) -> bool:
    xf = np.asarray(R.to_float_array(list(xhat)), dtype=float)
    return float(np.linalg.norm(q.M @ xf - q.beta)) >= q.lambda_1 * math.sqrt(q.n) / 2


def prox_bound_paraboloid_large_tangent(q: QuadricSet, xhat: Any) -> BoundReport | None:
    """Prox <= sqrt(n) when ||M xhat - beta|| >= lambda_1 sqrt(n)/2; None otherwise."""
    _require_paraboloid(q)
    if not large_tangent(q, xhat):
        return None
    return BoundReport(BoundKind.PROXIMITY, math.sqrt(q.n), "prox.paraboloid.large-tangent", True,
                       zn_covering_radius(q.n), ("xhat on the boundary", "large tangent"))


def prox_bound_paraboloid(q: QuadricSet, xhat: Any) -> BoundReport:
    """The better of the Theta-relaxed bound and the large-tangent shortcut."""
    theta = prox_bound_paraboloid_theta(q, xhat)
    lt = prox_bound_paraboloid_large_tangent(q, xhat)
    if lt is not None and lt.value <= theta.value:
        return lt
    return theta


def ig_bound_paraboloid_theta(q: QuadricSet, alpha: Any) -> BoundReport:
    rel = solve_relaxation(q, alpha)
    if not (rel.solvable and rel.unique):
        raise BoundNotApplicable("needs a unique relaxation optimizer")
    rep = prox_bound_paraboloid_theta(q, rel.optimizer)
    na = float(np.linalg.norm(np.asarray(R.to_float_array(list(alpha)), dtype=float)))
    return BoundReport(BoundKind.INTEGRALITY_GAP, na * rep.value, "ig.paraboloid.theta-relaxed", False,
                       rep.mu_used, rep.assumptions, details=dict(rep.details))


def ig_bound_paraboloid_large_angle(q: QuadricSet, alpha: Any) -> BoundReport | None:
    """IG <= ||alpha|| sqrt(n) when 0 < u^T alpha / ||alpha|| <= u^T beta / (lambda_1 sqrt(n)/2)."""
    _require_paraboloid(q)
    af = np.asarray(R.to_float_array(list(alpha)), dtype=float)
    na = float(np.linalg.norm(af))
    u = oriented_un(q, use_branch=False)
    ua = float(u @ af)
    if na == 0 or ua <= 0:
        return None
    rel = solve_relaxation(q, alpha)
    if not (rel.solvable and rel.unique):
        return None
    if ua / na > float(u @ q.beta) / (q.lambda_1 * math.sqrt(q.n) / 2):
        return None
    return BoundReport(BoundKind.INTEGRALITY_GAP, na * math.sqrt(q.n), "ig.paraboloid.large-angle", True,
                       zn_covering_radius(q.n), ("unique relaxation optimizer", "large angle"))


# ---------------------------------------------------------------------------
# slices of a normalized set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SliceCoefficients:
    q2: float | Fraction
    q1: float | Fraction
    q0: float | Fraction
    barQ: np.ndarray
    mu_barQ: CoveringRadius
    data: SliceQuadratic

    def r2(self, delta: float) -> float:
        return self.data.r2(delta)

    def p(self, delta: float) -> np.ndarray:
        """Slice center in barQ coordinates: the slice is ||barQ xbar - p(delta)|| <= r(delta)."""
        return np.linalg.solve(self.barQ.T, self.data.bbar - delta * self.data.a)


def slice_coefficients(q: QuadricSet) -> SliceCoefficients:
    sq = slice_quadratic(q)
    if q.n == 1:
        mu = CoveringRadius(0.0, 0.0, True, CoverMethod.ORTHOGONAL_BOX, Fraction(0))
        return SliceCoefficients(sq.q2, sq.q1, sq.q0, np.zeros((0, 0)), mu, sq)
    barQ = np.linalg.cholesky(sq.Mbar).T
    if sq.exact and q.exact is not None:
        mu = _mu_of_gram(tuple(row[:-1] for row in q.exact.M[:-1]))
    else:
        mu = _mu_of_gram(sq.Mbar)
    return SliceCoefficients(sq.q2, sq.q1, sq.q0, barQ, mu, sq)


def _f(x: float | Fraction) -> float:
    return float(x)


def _sqrtf(x: float | Fraction) -> float:
    return R.sqrt_float(x) if isinstance(x, Fraction) else math.sqrt(x)


def ellipsoid_slice_case(sc: SliceCoefficients, mu: float) -> int:
    """1 when the peak squared radius is below mu^2 - q2/4, else 2."""
    q2, q1, q0 = _f(sc.q2), _f(sc.q1), _f(sc.q0)
    peak = (q1 * q1 - 4 * q2 * q0) / (-4 * q2)
    return 1 if peak < mu * mu - q2 / 4 else 2


def ellipsoid_slice_values(sc: SliceCoefficients, mu: float, dinf: float, case: int | None = None) -> dict[str, float]:
    """Formula id -> value for the ellipsoid slice bounds at covering radius mu."""
    q2, q1, q0 = _f(sc.q2), _f(sc.q1), _f(sc.q0)
    D0 = q1 * q1 - 4 * q2 * q0
    case = case or ellipsoid_slice_case(sc, mu)
    if case == 1:
        return {"ig.slice.ellipsoid.case1": math.sqrt(max(D0, 0.0)) / (-q2),
                "ig.slice.ellipsoid.case1.weak": 2 * math.sqrt(mu * mu / (-q2) + 0.25)}
    Dmu = q1 * q1 - 4 * q2 * (q0 - mu * mu)
    d1 = (-q1 + math.sqrt(Dmu)) / (2 * q2)
    return {"ig.slice.ellipsoid.case2": ceil_safe(d1) - dinf,
            "ig.slice.ellipsoid.case2.ceil-relaxed": (math.sqrt(max(D0, 0.0)) - math.sqrt(Dmu)) / (-2 * q2) + 1,
            "ig.slice.ellipsoid.case2.weak": mu / math.sqrt(-q2) + 1}


def paraboloid_slice_values(sc: SliceCoefficients, mu: float, mu_sq: Fraction | None = None) -> dict[str, Any]:
    q1, q0 = sc.q1, sc.q0
    if mu_sq is not None and isinstance(q1, Fraction) and isinstance(q0, Fraction):
        sharp = ceil_safe((mu_sq - q0) / q1) + q0 / q1
        weak = mu_sq / q1 + 1
        return {"ig.slice.paraboloid": sharp, "ig.slice.paraboloid.weak": weak}
    q1f, q0f = float(q1), float(q0)
    return {"ig.slice.paraboloid": ceil_safe((mu * mu - q0f) / q1f) + q0f / q1f,
            "ig.slice.paraboloid.weak": mu * mu / q1f + 1}


def hyperbolic_slice_values(sc: SliceCoefficients, mu: float, dinf: float) -> dict[str, float]:
    q2, q1, q0 = _f(sc.q2), _f(sc.q1), _f(sc.q0)
    Dmu = q1 * q1 - 4 * q2 * (q0 - mu * mu)
    d2 = (-q1 + math.sqrt(max(Dmu, 0.0))) / (2 * q2)
    return {"ig.slice.hyperboloid": ceil_safe(d2) - dinf,
            "ig.slice.hyperboloid.weak": mu / math.sqrt(q2) + 1}


_RHS_INDEPENDENT = {
    "ig.slice.ellipsoid.case1": False,
    "ig.slice.ellipsoid.case1.weak": True,
    "ig.slice.ellipsoid.case2": False,
    "ig.slice.ellipsoid.case2.ceil-relaxed": False,
    "ig.slice.ellipsoid.case2.weak": True,
    "ig.slice.paraboloid": False,
    "ig.slice.paraboloid.weak": False,
    "ig.slice.hyperboloid": False,
    "ig.slice.hyperboloid.weak": True,
}


def ig_bound_slice(q: QuadricSet) -> list[BoundReport]:
    """Slice-based IG bounds for a set normalized to the objective e_n (sharp variant first)."""
    cls = classify(q)
    kind = cls.kind
    dinf, unique = delta_inf(q)
    if not unique:
        raise AssumptionViolated("the relaxation optimum is not unique; use ig_bound_multiple_optima")
    sc = slice_coefficients(q)
    mu = sc.mu_barQ
    if kind is QuadricKind.ELLIPSOID:
        c_lo, c_hi = ellipsoid_slice_case(sc, mu.lower), ellipsoid_slice_case(sc, mu.upper)
        vals = ellipsoid_slice_values(sc, mu.upper, dinf)
        if c_lo != c_hi:
            # bracket straddles the case boundary: report the larger sharp value
            other = ellipsoid_slice_values(sc, mu.upper, dinf, case=1)
            vals["ig.slice.ellipsoid.case2"] = max(vals.get("ig.slice.ellipsoid.case2", 0.0),
                                                   other["ig.slice.ellipsoid.case1"])
        assumptions = ("unique optimum", f"case {c_hi}")
    elif kind is QuadricKind.PARABOLOID:
        vals = paraboloid_slice_values(sc, mu.upper, mu.squared if mu.exact else None)
        assumptions = ("unique optimum",)
    elif kind in HYPERBOLIC:
        vals = hyperbolic_slice_values(sc, mu.upper, dinf)
        assumptions = ("unique optimum", "valid branch")
    else:
        raise WrongQuadricClass(f"no slice bound for {kind.value}")
    out = []
    for fid, v in vals.items():
        ve = v if isinstance(v, Fraction) else None
        out.append(BoundReport(BoundKind.INTEGRALITY_GAP, float(v), fid, _RHS_INDEPENDENT[fid], mu, assumptions, ve,
                               {"q2": sc.q2, "q1": sc.q1, "q0": sc.q0, "delta_inf": dinf}))
    return out


def ig_bound_multiple_optima(q: QuadricSet) -> BoundReport:
    """IG <= 1 when e_n runs along an asymptote (or the optimal set is a ray)."""
    kind = classify(q).kind
    if kind not in HYPERBOLIC:
        raise WrongQuadricClass(f"needs a hyperbolic branch, got {kind.value}")
    _, unique = delta_inf(q)
    if unique:
        raise BoundNotApplicable("the optimum is unique")
    return BoundReport(BoundKind.INTEGRALITY_GAP, 1.0, "ig.multiple-optima", True, None,
                       ("non-unique or unattained optimum",), Fraction(1))


# ---------------------------------------------------------------------------
# intersection of two balls
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoSphereInstance:
    """{x : ||x|| <= r1, ||x - p e_1|| <= r2} in dimension n with objective alpha."""

    r1: float
    r2: float
    p: float
    n: int
    alpha: tuple = ()

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("p must be positive")
        if self.r1 <= 0 or self.r2 <= 0:
            raise ValueError("radii must be positive")
        if self.alpha and len(self.alpha) != self.n:
            raise ValueError("alpha must have length n")

    @property
    def kappa(self) -> float:
        return (float(self.r1) + float(self.r2)) / float(self.p)

    @property
    def nonempty(self) -> bool:
        return self.r1 + self.r2 >= self.p

    def contains(self, x: Any, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        e = x.copy()
        e[0] -= float(self.p)
        return bool(x @ x <= float(self.r1) ** 2 + tol and e @ e <= float(self.r2) ** 2 + tol)

    def balls(self) -> tuple[Ellipsoid, Ellipsoid]:
        eye = [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        c2 = [self.p] + [0] * (self.n - 1)
        return Ellipsoid(eye, [0] * self.n, self.r1), Ellipsoid(eye, c2, self.r2)


def two_sphere_geometry(t: TwoSphereInstance) -> tuple[float, float | None, float]:
    """(H, h, W): rim half-height, height of a width-nu chord along x_1, and rim abscissa."""
    r1, r2, p = float(t.r1), float(t.r2), float(t.p)
    if r1 + r2 < p:
        raise InfeasibleSet("the two balls do not meet")
    W = (r1 * r1 - r2 * r2 + p * p) / (2 * p)
    prod = ((r1 + r2) ** 2 - p * p) * (p * p - (r1 - r2) ** 2)
    H = math.sqrt(max(prod, 0.0)) / (2 * p)
    nu = math.sqrt(t.n - 1)
    h = None
    if r1 + r2 >= p + nu:
        s = p + nu
        prod_h = ((r1 + r2) ** 2 - s * s) * (s * s - (r1 - r2) ** 2)
        if prod_h >= 0:
            h = math.sqrt(prod_h) / (2 * s)
    return H, h, W


def two_sphere_relaxation(t: TwoSphereInstance, alpha: Any = None) -> RelaxationResult:
    """min alpha^T x over the intersection: a ball optimum if it lies in the other ball, else a rim point."""
    a = np.asarray(R.to_float_array(list(alpha if alpha is not None else t.alpha)), dtype=float)
    if not t.nonempty:
        raise InfeasibleSet("the two balls do not meet")
    na = float(np.linalg.norm(a))
    if na == 0:
        return RelaxationResult(RelaxStatus.MULTIPLE_OPTIMA, 0.0, None, False, note="zero objective")
    r1, r2, p = float(t.r1), float(t.r2), float(t.p)
    x1 = -r1 * a / na
    if t.contains(x1):
        return RelaxationResult(RelaxStatus.SOLVABLE, float(a @ x1), x1, True)
    x2 = -r2 * a / na
    x2[0] += p
    if t.contains(x2):
        return RelaxationResult(RelaxStatus.SOLVABLE, float(a @ x2), x2, True)
    H, _, W = two_sphere_geometry(t)
    abar = a[1:]
    nb = float(np.linalg.norm(abar))
    x = np.zeros(t.n)
    x[0] = W
    if nb > 0:
        x[1:] = -H * abar / nb
    return RelaxationResult(RelaxStatus.SOLVABLE, float(a[0] * W - H * nb), x, nb > 0 or H == 0)


def two_sphere_width_gain(kappa: float, nu: float) -> float:
    """max of f(a, b, c) - f(a, b, c + nu) over the feasible region: (nu/2) sqrt((kappa+1)/(kappa-1))."""
    if not (kappa > nu > 0):
        raise BoundNotApplicable("needs kappa > nu > 0")
    return nu / 2 * math.sqrt((kappa + 1) / (kappa - 1))


def ig_bound_two_sphere(t: TwoSphereInstance, alpha: Any = None) -> BoundReport:
    """min over j* >= 2 of ||alpha_{-j*}|| nu + |alpha_{j*}| ceil((nu/2) sqrt((kappa+1)/(kappa-1)))."""
    a = np.asarray(R.to_float_array(list(alpha if alpha is not None else t.alpha)), dtype=float)
    n = t.n
    if n < 2:
        raise BoundNotApplicable("needs n >= 2")
    nu = math.sqrt(n - 1)
    kappa = t.kappa
    if float(t.r1) + float(t.r2) - float(t.p) < nu - 1e-12:
        raise BoundNotApplicable("needs r1 + r2 - p >= sqrt(n-1)")
    if kappa <= nu:
        raise BoundNotApplicable("needs kappa > sqrt(n-1)")
    k = ceil_safe(two_sphere_width_gain(kappa, nu))
    best, best_j = math.inf, None
    for j in range(1, n):
        rest = np.delete(a, j)
        v = float(np.linalg.norm(rest)) * nu + abs(float(a[j])) * k
        if v < best - 1e-15:
            best, best_j = v, j
    return BoundReport(BoundKind.INTEGRALITY_GAP, best, "ig.two-sphere", False, zn_covering_radius(n - 1),
                       ("r1 + r2 - p >= sqrt(n-1)", "kappa > sqrt(n-1)"),
                       Fraction(k) if best == k else None,
                       {"kappa": kappa, "j_star": best_j + 1, "ceil_term": k})


# ---------------------------------------------------------------------------
# everything that applies to one instance
# ---------------------------------------------------------------------------


def _safe(fn, *args) -> list[BoundReport]:
    try:
        out = fn(*args)
    except (BoundNotApplicable, WrongQuadricClass, AssumptionViolated, NoFullDimRecessionCone):
        return []
    if out is None:
        return []
    return out if isinstance(out, list) else [out]


def all_bounds(S: QuadricSet | Ellipsoid | TwoSphereInstance, alpha: Sequence[Any],
               relaxation: RelaxationResult | None = None, check_feasible: bool = True) -> list[BoundReport]:
    """Every proximity and IG bound that applies to (S, alpha).

    Proximity bounds are anchored at the relaxation optimizer; slice bounds are
    computed in normalized coordinates and scaled back.
    """
    if isinstance(S, TwoSphereInstance):
        return _safe(ig_bound_two_sphere, S, alpha)
    if isinstance(S, Ellipsoid):
        return [prox_bound_ellipsoid(S, check_feasible), ig_bound_ellipsoid(S, alpha, check_feasible)]
    rel = relaxation or solve_relaxation(S, alpha)
    kind = classify(S).kind
    out: list[BoundReport] = []
    if kind is QuadricKind.ELLIPSOID:
        out += [prox_bound_ellipsoid(S, check_feasible), ig_bound_ellipsoid(S, alpha, False)]
    elif kind is QuadricKind.PARABOLOID and rel.solvable:
        out += _safe(prox_bound_paraboloid_theta, S, rel.optimizer)
        out += _safe(prox_bound_paraboloid_large_tangent, S, rel.optimizer)
        out += _safe(ig_bound_paraboloid_theta, S, alpha)
        out += _safe(ig_bound_paraboloid_large_angle, S, alpha)
    elif kind in HYPERBOLIC and rel.status is not RelaxStatus.UNBOUNDED:
        out += _safe(prox_bound_full_dim_cone, S)
        out += _safe(prox_bound_hyperboloid, S)
        out += _safe(ig_bound_full_dim_cone, S, alpha)
        out += _safe(ig_bound_hyperboloid, S, alpha)
    if rel.status is RelaxStatus.UNBOUNDED:
        return out
    try:
        ni = normalize_objective(S, alpha)
    except Exception:
        return out
    if kind in HYPERBOLIC and not rel.unique:
        out += [r.scaled(ni.scale) for r in _safe(ig_bound_multiple_optima, ni.set)]
    elif kind in (QuadricKind.ELLIPSOID, QuadricKind.PARABOLOID) + HYPERBOLIC:
        out += [r.scaled(ni.scale) for r in _safe(ig_bound_slice, ni.set)]
    return out
