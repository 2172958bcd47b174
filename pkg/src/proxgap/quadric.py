"""Simple second-order conic sets and their quadric geometry.

Three representations are supported:

* ``SocrSet``      {x : ||Ax - b|| <= c^T x - d}
* ``QuadricSet``   {x : x^T M x - 2 beta^T x + gamma <= 0}, optionally
                   intersected with a branch half-space g^T x >= h
* ``Ellipsoid``    {x : ||Qx - p|| <= r}

Data given as ints, Fractions or "p/q" strings is also kept in exact rational
form, and every sign decision that can be made exactly is made exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from . import _rational as R
from .errors import (InfeasibleAnchor, InfeasibleSet, InvalidBranch, InvalidRegularizer, NoFullDimRecessionCone,
                     NoLargeBalls, NotAQuadricOfInterest, PreconditionViolated, WrongQuadricClass)

MEMBERSHIP_TOL = 1e-9


def tolerance(M: np.ndarray) -> float:
    """Eigenvalue sign band tau = 1e-9 (1 + ||M||_2)."""
    return 1e-9 * (1.0 + (np.linalg.norm(M, 2) if M.size else 0.0))


@dataclass(frozen=True)
class ExactQuadric:
    M: R.FMat
    beta: R.FVec
    gamma: Fraction
    g: R.FVec | None = None
    h: Fraction | None = None

    def residual(self, x: Sequence[int | Fraction]) -> Fraction:
        xf = tuple(Fraction(v) for v in x)
        return R.quad(self.M, xf) - 2 * R.dot(self.beta, xf) + self.gamma

    def contains(self, x: Sequence[int | Fraction]) -> bool:
        if self.residual(x) > 0:
            return False
        if self.g is not None:
            return R.dot(self.g, tuple(Fraction(v) for v in x)) >= self.h
        return True


class QuadricSet:
    """Q = {x^T M x - 2 beta^T x + gamma <= 0}, optionally cut by g^T x >= h."""

    def __init__(self, M: Any, beta: Any, gamma: Any, branch: Any = None, *, check_branch: bool = True):
        M_rows = [list(r) for r in (M.tolist() if isinstance(M, np.ndarray) else M)]
        beta_l = list(beta.tolist() if isinstance(beta, np.ndarray) else beta)
        self.M = R.to_float_array(M_rows).reshape(len(M_rows), len(M_rows))
        self.n = self.M.shape[0]
        self.beta = R.to_float_array(beta_l).reshape(self.n)
        self.gamma = float(R.parse_scalar(gamma))
        if not np.allclose(self.M, self.M.T, rtol=0, atol=1e-12 * (1 + np.abs(self.M).max(initial=0))):
            raise ValueError("M must be symmetric")
        self.M = 0.5 * (self.M + self.M.T)
        eM = R.try_exact_mat(M_rows)
        eb = R.try_exact_vec(beta_l)
        eg = R.try_exact_scalar(gamma)
        self.g: np.ndarray | None = None
        self.h: float | None = None
        g_ex = h_ex = None
        branch_exact_ok = True
        if branch is not None:
            g, h, *rest = branch
            sense = rest[0] if rest else ">="
            g_l = list(g.tolist() if isinstance(g, np.ndarray) else g)
            gv = R.to_float_array(g_l).reshape(self.n)
            hv = float(R.parse_scalar(h))
            g_ex = R.try_exact_vec(g_l)
            h_ex = R.try_exact_scalar(h)
            if sense == "<=":
                gv, hv = -gv, -hv
                g_ex = tuple(-v for v in g_ex) if g_ex is not None else None
                h_ex = -h_ex if h_ex is not None else None
            elif sense != ">=":
                raise ValueError("branch sense must be '>=' or '<='")
            if not np.any(gv != 0):
                raise InvalidBranch("branch normal g must be nonzero")
            self.g, self.h = gv, hv
            branch_exact_ok = g_ex is not None and h_ex is not None
        if eM is not None and eb is not None and eg is not None and branch_exact_ok:
            self.exact: ExactQuadric | None = ExactQuadric(eM, eb, eg, g_ex, h_ex)
        else:
            self.exact = None
        if check_branch and self.g is not None:
            kind = classify(self, ignore_branch=True).kind
            if kind in (QuadricKind.TWO_SHEET_HYPERBOLOID, QuadricKind.TRANSLATED_CONE):
                bb = branch_bounds(self, self.g, self.h)
                if not bb.separates:
                    raise InvalidBranch("branch inequality does not separate the two branches")

    # -- basic helpers -------------------------------------------------
    @property
    def has_branch(self) -> bool:
        return self.g is not None

    @property
    def branch(self) -> tuple[np.ndarray, float] | None:
        return None if self.g is None else (self.g, self.h)

    @cached_property
    def tau(self) -> float:
        return tolerance(self.M)

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues in descending order lambda_1 >= ... >= lambda_n and matching columns."""
        w, V = np.linalg.eigh(self.M)
        return w[::-1].copy(), V[:, ::-1].copy()

    @property
    def lambda_1(self) -> float:
        return float(self.eigh[0][0])

    @property
    def lambda_n(self) -> float:
        return float(self.eigh[0][-1])

    def residual(self, x: Any) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.M @ x - 2 * self.beta @ x + self.gamma)

    def residuals(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.einsum("pi,ij,pj->p", X, self.M, X) - 2 * X @ self.beta + self.gamma

    def contains(self, x: Any, tol: float = MEMBERSHIP_TOL) -> bool:
        if self.exact is not None and _is_integral(x):
            return self.exact.contains([int(round(v)) for v in np.asarray(x, dtype=float)])
        ok = self.residual(x) <= tol
        if ok and self.g is not None:
            ok = float(self.g @ np.asarray(x, dtype=float)) >= self.h - tol
        return ok

    def with_data(self, M=None, beta=None, gamma=None, branch="keep", check_branch=True) -> "QuadricSet":
        ex = self.exact
        M = M if M is not None else (_rows(ex.M) if ex else self.M)
        beta = beta if beta is not None else (list(ex.beta) if ex else self.beta)
        gamma = gamma if gamma is not None else (ex.gamma if ex else self.gamma)
        if isinstance(branch, str) and branch == "keep":
            if self.g is None:
                branch = None
            elif ex is not None and ex.g is not None:
                branch = (list(ex.g), ex.h)
            else:
                branch = (self.g, self.h)
        return QuadricSet(M, beta, gamma, branch, check_branch=check_branch)

    def translated(self, t: Any) -> "QuadricSet":
        """The set shifted by t: {x + t : x in self}.  Same M, new right-hand side."""
        ex = self.exact
        tt = R.try_exact_vec(list(t)) if not isinstance(t, np.ndarray) or t.dtype.kind in "iuO" else None
        if ex is not None and tt is not None:
            Mt = R.matvec(ex.M, tt)
            beta = R.vadd(ex.beta, Mt)
            gamma = ex.gamma + 2 * R.dot(ex.beta, tt) + R.dot(tt, Mt)
            branch = None if ex.g is None else (list(ex.g), ex.h + R.dot(ex.g, tt))
            return QuadricSet(_rows(ex.M), list(beta), gamma, branch)
        tf = np.asarray(R.to_float_array(list(t)), dtype=float)
        beta = self.beta + self.M @ tf
        gamma = self.gamma + 2 * self.beta @ tf + tf @ self.M @ tf
        branch = None if self.g is None else (self.g, self.h + float(self.g @ tf))
        return QuadricSet(self.M, beta, gamma, branch)

    def transformed(self, U: Any) -> "QuadricSet":
        """The set in coordinates y with x = U y (U integer and unimodular in practice)."""
        ex = self.exact
        U_ex = R.try_exact_mat(U if not isinstance(U, np.ndarray) else U.astype(np.int64))
        if ex is not None and U_ex is not None:
            Ut = R.transpose(U_ex)
            M2 = R.matmul(R.matmul(Ut, ex.M), U_ex)
            b2 = R.matvec(Ut, ex.beta)
            branch = None if ex.g is None else (list(R.matvec(Ut, ex.g)), ex.h)
            return QuadricSet(_rows(M2), list(b2), ex.gamma, branch, check_branch=False)
        Uf = np.asarray(R.to_float_array(U), dtype=float)
        branch = None if self.g is None else (Uf.T @ self.g, self.h)
        return QuadricSet(Uf.T @ self.M @ Uf, Uf.T @ self.beta, self.gamma, branch, check_branch=False)

    def __repr__(self) -> str:
        tail = "" if self.g is None else f", branch=({self.g.tolist()}, {self.h})"
        return f"QuadricSet(M={self.M.tolist()}, beta={self.beta.tolist()}, gamma={self.gamma}{tail})"


def _rows(A: R.FMat) -> list[list[Fraction]]:
    return [list(r) for r in A]


def _is_integral(x: Any) -> bool:
    a = np.asarray(x)
    if a.dtype.kind in "iu":
        return True
    if a.dtype.kind == "f":
        return bool(np.all(a == np.round(a)))
    return False


class SocrSet:
    """{x : ||A x - b|| <= c^T x - d}."""

    def __init__(self, A: Any, b: Any, c: Any, d: Any):
        A_rows = [list(r) for r in (A.tolist() if isinstance(A, np.ndarray) else A)]
        self.A = R.to_float_array(A_rows).reshape(len(A_rows), -1)
        k, n = self.A.shape
        b_l = list(b.tolist() if isinstance(b, np.ndarray) else b)
        c_l = list(c.tolist() if isinstance(c, np.ndarray) else c)
        self.b = R.to_float_array(b_l).reshape(k)
        self.c = R.to_float_array(c_l).reshape(n)
        self.d = float(R.parse_scalar(d))
        self.n = n
        eA, eb, ec, ed = R.try_exact_mat(A_rows), R.try_exact_vec(b_l), R.try_exact_vec(c_l), R.try_exact_scalar(d)
        self.exact = (eA, eb, ec, ed) if None not in (eA, eb, ec, ed) else None

    def slack(self, x: Any) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.c @ x - self.d - np.linalg.norm(self.A @ x - self.b))

    def contains(self, x: Any, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.slack(x) >= -tol


class Ellipsoid:
    """{x : ||Q x - p|| <= r}; ``exact`` keeps (M, beta, gamma) = (Q^T Q, Q^T p, p^T p - r^2) when rational."""

    def __init__(self, Q: Any, p: Any, r: Any, exact: ExactQuadric | None = None):
        self.Q = np.asarray(R.to_float_array(Q.tolist() if isinstance(Q, np.ndarray) else Q), dtype=float)
        self.n = self.Q.shape[0]
        self.p = np.asarray(R.to_float_array(list(p)), dtype=float).reshape(self.n)
        self.r = float(R.parse_scalar(r))
        if self.r < 0:
            raise ValueError("radius must be nonnegative")
        if abs(np.linalg.det(self.Q)) == 0:
            raise ValueError("Q must be invertible")
        if exact is None:
            eQ = R.try_exact_mat(Q.tolist() if isinstance(Q, np.ndarray) else Q)
            ep = R.try_exact_vec(list(p))
            er = R.try_exact_scalar(r)
            if eQ is not None and ep is not None and er is not None:
                Qt = R.transpose(eQ)
                exact = ExactQuadric(R.matmul(Qt, eQ), R.matvec(Qt, ep), R.dot(ep, ep) - er * er)
        self.exact = exact

    @property
    def gram(self) -> np.ndarray:
        return self.Q.T @ self.Q

    def as_quadric(self) -> QuadricSet:
        if self.exact is not None:
            return QuadricSet(_rows(self.exact.M), list(self.exact.beta), self.exact.gamma)
        return QuadricSet(self.Q.T @ self.Q, self.Q.T @ self.p, float(self.p @ self.p - self.r ** 2))

    def contains(self, x: Any, tol: float = MEMBERSHIP_TOL) -> bool:
        if self.exact is not None and _is_integral(x):
            return self.exact.contains([int(round(v)) for v in np.asarray(x, dtype=float)])
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(self.Q @ x - self.p)) <= self.r + tol

    @property
    def center(self) -> np.ndarray:
        return np.linalg.solve(self.Q, self.p)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


class QuadricKind(str, enum.Enum):
    ELLIPSOID = "Ellipsoid"
    SINGLETON = "Singleton"
    EMPTY = "Empty"
    PARABOLOID = "Paraboloid"
    CYLINDER = "Cylinder"
    LINE = "Line"
    ONE_SHEET_HYPERBOLOID = "OneSheetHyperboloid"
    TRANSLATED_CONE = "TranslatedCone"
    TWO_SHEET_HYPERBOLOID = "TwoSheetHyperboloid"


HYPERBOLIC = (QuadricKind.TWO_SHEET_HYPERBOLOID, QuadricKind.TRANSLATED_CONE)


@dataclass(frozen=True)
class QuadricClass:
    kind: QuadricKind
    qstar: float | None = None
    qhat: float | None = None
    center: np.ndarray | None = None
    tau: float = 0.0
    lambdas: np.ndarray | None = None
    qstar_exact: Fraction | None = None
    exact: bool = False

    def __str__(self) -> str:
        if self.qstar is not None:
            return f"{self.kind.value} q*={_fmt(self.qstar_exact if self.qstar_exact is not None else self.qstar)}"
        if self.qhat is not None:
            return f"{self.kind.value} qhat={_fmt(self.qhat)}"
        return self.kind.value


def _fmt(v: Any) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return f"{v:.12g}"


def classify(q: QuadricSet, ignore_branch: bool = False) -> QuadricClass:
    """Shape of {x^T M x - 2 beta^T x + gamma <= 0} from the eigenvalues of M and q*."""
    lam, _ = q.eigh
    tau = q.tau
    n = q.n
    if n > 1 and np.sum(lam > tau) < n - 1:
        raise NotAQuadricOfInterest("M needs at least n-1 positive eigenvalues")
    if n == 1 and lam[0] <= tau and lam[0] >= -tau:
        raise NotAQuadricOfInterest("M = 0 describes a half-line, not a quadric of interest")
    ex = q.exact
    if ex is not None:
        d = R.det(ex.M)
        sign = (d > 0) - (d < 0)
    else:
        ln = lam[-1]
        sign = 1 if ln > tau else (-1 if ln < -tau else 0)
    if sign != 0:
        if ex is not None:
            c_ex = R.solve(ex.M, ex.beta)
            qs_ex = R.dot(ex.beta, c_ex) - ex.gamma
            center = R.as_float(c_ex)
            qstar = float(qs_ex)
            s = (qs_ex > 0) - (qs_ex < 0)
        else:
            qs_ex = None
            center = np.linalg.solve(q.M, q.beta)
            qstar = float(q.beta @ center - q.gamma)
            band = tau * (1 + float(np.abs(center) @ np.abs(q.beta)) + abs(q.gamma))
            s = 1 if qstar > band else (-1 if qstar < -band else 0)
        if sign > 0:
            kind = {1: QuadricKind.ELLIPSOID, 0: QuadricKind.SINGLETON, -1: QuadricKind.EMPTY}[s]
        else:
            kind = {1: QuadricKind.ONE_SHEET_HYPERBOLOID, 0: QuadricKind.TRANSLATED_CONE,
                    -1: QuadricKind.TWO_SHEET_HYPERBOLOID}[s]
        if (not ignore_branch and q.has_branch and kind in (QuadricKind.ELLIPSOID, QuadricKind.SINGLETON)
                and _branch_excludes(q, center)):
            kind = QuadricKind.EMPTY
        return QuadricClass(kind, qstar, None, center, tau, lam, qs_ex, ex is not None)
    # singular M: paraboloid or a cylinder-type set
    if ex is not None:
        null = R.nullspace(ex.M)
        consistent = all(R.dot(ex.beta, v) == 0 for v in null)
        if consistent:
            xh = R.solve_consistent(ex.M, ex.beta)
            qh_ex = R.quad(ex.M, xh) - ex.gamma
            qhat = float(qh_ex)
            s = (qh_ex > 0) - (qh_ex < 0)
    else:
        xh_f, *_ = np.linalg.lstsq(q.M, q.beta, rcond=None)
        consistent = np.linalg.norm(q.M @ xh_f - q.beta) <= tau * (1 + np.linalg.norm(q.beta))
        if consistent:
            qhat = float(xh_f @ q.M @ xh_f - q.gamma)
            band = tau * (1 + abs(q.gamma) + float(np.abs(xh_f) @ np.abs(q.beta)))
            s = 1 if qhat > band else (-1 if qhat < -band else 0)
    if not consistent:
        kind = QuadricKind.PARABOLOID
        if not ignore_branch and q.has_branch and _branch_excludes(q, _paraboloid_interior_point(q)):
            kind = QuadricKind.EMPTY
        return QuadricClass(kind, None, None, None, tau, lam, None, ex is not None)
    if s < 0:
        kind = QuadricKind.EMPTY
    elif s == 0 or n == 1:
        kind = QuadricKind.LINE if s == 0 else QuadricKind.CYLINDER
    else:
        kind = QuadricKind.CYLINDER
    return QuadricClass(kind, None, qhat, None, tau, lam, None, ex is not None)


def _branch_excludes(q: QuadricSet, interior: np.ndarray) -> bool:
    """For convex Q the branch is either redundant or cuts everything off (up to touching points)."""
    return float(q.g @ interior) < q.h - q.tau * (1 + abs(q.h))


def _paraboloid_interior_point(q: QuadricSet) -> np.ndarray:
    u = oriented_un(q, use_branch=False)
    x0, *_ = np.linalg.lstsq(q.M, q.beta, rcond=None)
    bu = float(q.beta @ u)
    t = (q.residual(x0) + 1.0) / (2 * bu)
    return x0 + max(t, 0.0) * u


def paraboloid_direction_exact(q: QuadricSet) -> R.FVec | None:
    """Rational recession direction v (M v = 0, beta^T v > 0) of an exact paraboloid."""
    if q.exact is None:
        return None
    null = R.nullspace(q.exact.M)
    if len(null) != 1:
        return None
    v = null[0]
    s = R.dot(q.exact.beta, v)
    if s == 0:
        return None
    return v if s > 0 else tuple(-a for a in v)


def oriented_un(q: QuadricSet, use_branch: bool = True) -> np.ndarray:
    """Unit eigenvector of lambda_n, signed into the branch (g^T u > 0) or else with beta^T u >= 0."""
    _, V = q.eigh
    u = V[:, -1].copy()
    if use_branch and q.has_branch and q.lambda_n < -q.tau:
        if float(q.g @ u) < 0:
            u = -u
        return u
    if q.exact is not None and abs(q.lambda_n) <= q.tau:
        v = paraboloid_direction_exact(q)
        if v is not None:
            vf = R.as_float(v)
            return vf / np.linalg.norm(vf)
    if float(q.beta @ u) < 0:
        u = -u
    return u


# ---------------------------------------------------------------------------
# branches of hyperbolic quadrics
# ---------------------------------------------------------------------------


class BranchRegime(str, enum.Enum):
    ASYMPTOTIC = "Asymptotic"
    BOUNDED_BELOW_ON_PLUS = "BoundedBelowOnPlus"
    BOUNDED_BELOW_ON_MINUS = "BoundedBelowOnMinus"
    UNBOUNDED_BOTH = "UnboundedBoth"


@dataclass(frozen=True)
class BranchBounds:
    regime: BranchRegime
    h_minus: float | None
    h_plus: float | None
    gMg: float
    separates: bool | None = None


def _minv_forms(q: QuadricSet, g: np.ndarray, g_exact: R.FVec | None):
    """(g^T M^-1 g, g^T M^-1 beta, q*) exactly when possible."""
    ex = q.exact
    if ex is not None and g_exact is not None:
        y = R.solve(ex.M, g_exact)
        c = R.solve(ex.M, ex.beta)
        return R.dot(g_exact, y), R.dot(ex.beta, y), R.dot(ex.beta, c) - ex.gamma
    y = np.linalg.solve(q.M, g)
    c = np.linalg.solve(q.M, q.beta)
    return float(g @ y), float(q.beta @ y), float(q.beta @ c - q.gamma)


def branch_bounds(q: QuadricSet, g: Any, h_query: Any = None) -> BranchBounds:
    """Range of g^T x on the two branches and whether g^T x = h_query separates them."""
    cls = classify(q, ignore_branch=True)
    if cls.kind not in HYPERBOLIC:
        raise WrongQuadricClass(f"branch analysis needs a cone or two-sheet hyperboloid, got {cls.kind.value}")
    g_list = list(g.tolist() if isinstance(g, np.ndarray) else g)
    gf = np.asarray(R.to_float_array(g_list), dtype=float)
    g_ex = R.try_exact_vec(g_list) if not isinstance(g, np.ndarray) or g.dtype.kind in "iuO" else None
    if q.exact is not None and g_ex is None and np.all(gf == np.round(gf)):
        g_ex = tuple(Fraction(int(v)) for v in gf)
    gMg, gMb, qstar = _minv_forms(q, gf, g_ex)
    is_exact = isinstance(gMg, Fraction)
    tol = 0 if is_exact else q.tau * (1 + float(gf @ gf)) * 10
    if gMg > tol:
        regime, hm, hp = BranchRegime.UNBOUNDED_BOTH, None, None
    elif gMg >= -tol:
        regime, hm, hp = BranchRegime.ASYMPTOTIC, float(gMb), float(gMb)
    else:
        rad = math.sqrt(max(float(qstar * gMg), 0.0))
        regime, hm, hp = BranchRegime.BOUNDED_BELOW_ON_PLUS, float(gMb) - rad, float(gMb) + rad
        if q.has_branch:
            # which branch does the stored half-space select?
            u = oriented_un(q)
            if float(gf @ u) < 0:
                regime = BranchRegime.BOUNDED_BELOW_ON_MINUS
    separates = None
    if h_query is not None:
        hq = R.parse_scalar(h_query)
        h_ex = hq if isinstance(hq, Fraction) else None
        hqf = float(hq)
        htol = 1e-9 * (1 + abs(hqf))
        if cls.kind is QuadricKind.TRANSLATED_CONE:
            if regime in (BranchRegime.BOUNDED_BELOW_ON_PLUS, BranchRegime.BOUNDED_BELOW_ON_MINUS):
                if is_exact and h_ex is not None and cls.qstar_exact == 0:
                    separates = h_ex == gMb
                else:
                    separates = abs(hqf - float(gMb)) <= htol
            else:
                separates = False
        else:
            if regime is BranchRegime.UNBOUNDED_BOTH:
                separates = False
            elif regime is BranchRegime.ASYMPTOTIC:
                separates = (h_ex == gMb) if (is_exact and h_ex is not None) else abs(hqf - float(gMb)) <= htol
            else:
                separates = hm - htol <= hqf <= hp + htol
    return BranchBounds(regime, hm, hp, float(gMg), separates)


def psi_constant(q: QuadricSet) -> float:
    """Largest rho such that B(d, rho) fits in the recession cone for some unit d.

    The recession cone of a branch is {z : sum_i lambda_i z_i^2 <= 0, z_n >= 0}
    in eigen-coordinates.  It contains the circular cone of half-angle theta
    with tan(theta)^2 = -lambda_n / lambda_1 and touches it, so the best
    direction is the axis u_n and rho = sin(theta).
    """
    cls = classify(q, ignore_branch=True)
    if cls.kind not in HYPERBOLIC or q.lambda_n >= -q.tau:
        raise NoFullDimRecessionCone("Psi needs lambda_n < 0 (a cone or a two-sheet hyperboloid branch)")
    if q.n == 1:
        return 1.0
    l1, ln = q.lambda_1, q.lambda_n
    return math.sqrt(-ln / (l1 - ln))


def ball_shift(q: QuadricSet, x0: Any, r: float) -> tuple[float, np.ndarray]:
    """Theta >= 0 and unit u with B(x0 + Theta u, r) inside the set.

    Paraboloid:  Theta_0 = (r^2 lambda_1 + 2 r ||M x0 - beta||) / (2 beta^T u).
    Hyperbolic:  Theta_- is the largest root of
                 lambda_n t^2 + 2 B t + C = 0,  B = lambda_n x0^T u - beta^T u + r |lambda_n|,
                 C = r^2 lambda_1 + 2 r ||M x0 - beta||.
    """
    x0 = np.asarray(R.to_float_array(list(x0)), dtype=float)
    l1, ln, tau = q.lambda_1, q.lambda_n, q.tau
    if l1 <= tau or ln > tau:
        raise NoLargeBalls("arbitrarily large balls need lambda_1 > 0 >= lambda_n")
    if not q.contains(x0, tol=1e-9 * (1 + float(x0 @ x0))):
        raise InfeasibleAnchor("x0 is not in the set")
    grad = float(np.linalg.norm(q.M @ x0 - q.beta))
    C = r * r * l1 + 2 * r * grad
    if ln >= -tau:
        u = oriented_un(q, use_branch=False)
        bu = float(q.beta @ u)
        if bu <= tau * (1 + np.linalg.norm(q.beta)):
            raise PreconditionViolated("beta^T u_n must be positive for a paraboloid")
        return C / (2 * bu), u
    u = oriented_un(q)
    B = ln * float(x0 @ u) - float(q.beta @ u) + r * abs(ln)
    disc = B * B - ln * C
    theta = (-B - math.sqrt(disc)) / ln
    return max(theta, 0.0), u


def inner_ellipsoid(q: QuadricSet, xhat: Any, D: Any) -> Ellipsoid:
    """{x : ||D x - (D xhat - D^-1 dhat)|| <= ||D^-1 dhat||}, dhat = M xhat - beta, inside q when D^2 >= M."""
    xhat = np.asarray(R.to_float_array(list(xhat)), dtype=float)
    D = np.asarray(R.to_float_array(D.tolist() if isinstance(D, np.ndarray) else D), dtype=float)
    if not np.allclose(D, D.T):
        raise InvalidRegularizer("D must be symmetric")
    wD = np.linalg.eigvalsh(D)
    if wD.min() <= 0:
        raise InvalidRegularizer("D must be positive definite")
    gap = np.linalg.eigvalsh(D @ D - q.M)
    if gap.min() < -q.tau:
        raise InvalidRegularizer("D^2 - M must be positive semidefinite")
    if not q.contains(xhat, tol=1e-9 * (1 + float(xhat @ xhat))):
        raise InfeasibleAnchor("xhat is not in the set")
    dhat = q.M @ xhat - q.beta
    Dinv_d = np.linalg.solve(D, dhat)
    return Ellipsoid(D, D @ xhat - Dinv_d, float(np.linalg.norm(Dinv_d)))


# ---------------------------------------------------------------------------
# representation changes
# ---------------------------------------------------------------------------


def socr_to_qr(s: SocrSet) -> QuadricSet:
    """Square both sides: M = A^T A - c c^T, beta = A^T b - d c, gamma = b^T b - d^2, branch c^T x >= d.

    The branch is dropped when M is positive semidefinite and an interior point
    of the (convex) quadric already satisfies c^T x >= d; then no point of the
    quadric can violate it.
    """
    if not np.any(s.c != 0):
        if s.d > 0:
            raise InfeasibleSet("c = 0 and d > 0 leaves no feasible point")
    if s.exact is not None:
        A, b, c, d = s.exact
        At = R.transpose(A)
        M = R.sub(R.matmul(At, A), R.outer(c, c))
        beta = R.vsub(R.matvec(At, b), R.vscale(d, c))
        gamma = R.dot(b, b) - d * d
        branch = (list(c), d) if any(v != 0 for v in c) else None
        q = QuadricSet(_rows(M), list(beta), gamma, branch, check_branch=False)
    else:
        M = s.A.T @ s.A - np.outer(s.c, s.c)
        beta = s.A.T @ s.b - s.d * s.c
        gamma = float(s.b @ s.b - s.d ** 2)
        q = QuadricSet(M, beta, gamma, (s.c, s.d), check_branch=False) if np.any(s.c != 0) else \
            QuadricSet(M, beta, gamma)
    if not q.has_branch:
        return q
    lam = q.lambda_n
    if lam >= -q.tau:
        try:
            cls = classify(q, ignore_branch=True)
        except NotAQuadricOfInterest:
            return q
        if cls.kind is QuadricKind.ELLIPSOID:
            interior = cls.center
        elif cls.kind is QuadricKind.PARABOLOID:
            interior = _paraboloid_interior_point(q)
        else:
            return q
        if not _branch_excludes(q, interior):
            return q.with_data(branch=None)
    return q


def qr_to_er(q: QuadricSet) -> Ellipsoid:
    """Q = upper Cholesky factor of M, p = Q^-T beta, r = sqrt(p^T p - gamma)."""
    cls = classify(q)
    if q.lambda_n <= q.tau:
        raise WrongQuadricClass("M is not positive definite")
    if cls.kind is QuadricKind.EMPTY:
        raise InfeasibleSet("p^T p - gamma < 0")
    L = np.linalg.cholesky(q.M)
    Q = L.T
    p = np.linalg.solve(L, q.beta)
    r2 = float(p @ p - q.gamma)
    if cls.qstar_exact is not None:
        r2 = float(cls.qstar_exact)
    exact = None
    if q.exact is not None:
        exact = ExactQuadric(q.exact.M, q.exact.beta, q.exact.gamma)
    return Ellipsoid(Q, p, math.sqrt(max(r2, 0.0)), exact=exact)


def socr_to_er(s: SocrSet) -> Ellipsoid:
    q = socr_to_qr(s)
    if q.lambda_n <= q.tau:
        raise WrongQuadricClass("the SOC set is not bounded")
    return qr_to_er(q)


def check_lineality_trivial(q: QuadricSet) -> bool:
    """True iff no nonzero d has M d = 0, beta^T d = 0 (and g^T d = 0 with a branch)."""
    if q.exact is not None:
        null = R.nullspace(q.exact.M)
        if not null:
            return True
        rows = [tuple(R.dot(q.exact.beta, v) for v in null)]
        if q.exact.g is not None:
            rows.append(tuple(R.dot(q.exact.g, v) for v in null))
        return R.rank(tuple(rows)) == len(null)
    lam, V = q.eigh
    N = V[:, np.abs(lam) <= q.tau]
    if N.shape[1] == 0:
        return True
    rows = [q.beta @ N]
    if q.g is not None:
        rows.append(q.g @ N)
    A = np.vstack(rows)
    return int(np.linalg.matrix_rank(A, tol=q.tau * (1 + np.abs(A).max()))) == N.shape[1]
