"""Mixed-integer lattices L(E, F) = {Ez + Fy : z integer, y real}.

Covering radii are computed exactly where a closed form exists (mutually
orthogonal generators, or at most two integer generators) and bracketed
otherwise.  Rational input stays rational until the final square root.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import _rational as R
from .errors import InvalidLattice

UPPER_SLACK = 1e-12
_TIE_TOL = 1e-12


class CoverMethod(str, enum.Enum):
    ORTHOGONAL_BOX = "orthogonal-box"
    OBTUSE_SUPERBASE_2D = "obtuse-superbase-2d"
    NEAREST_PLANE_UPPER = "nearest-plane-upper"


@dataclass(frozen=True)
class CoveringRadius:
    lower: float
    upper: float
    exact: bool
    method: CoverMethod
    squared: Fraction | None = None  # exact mu^2 when known

    @property
    def value(self) -> float:
        """Best single number: the exact value, else the certified upper end."""
        return self.upper


@dataclass(frozen=True)
class LatticePoint:
    point: np.ndarray
    z: tuple[int, ...]
    y: np.ndarray
    distance: float


@dataclass(frozen=True)
class ContainmentResult:
    contains: bool
    witness: LatticePoint | None
    covering_radius: CoveringRadius


class MixedLattice:
    """Generators E (integer part, m x n1) and F (continuous part, m x n2)."""

    def __init__(self, E: Any, F: Any = None):
        E_rows = _as_rows(E)
        m = len(E_rows)
        if F is None or (hasattr(F, "__len__") and len(F) == 0):
            F_rows: list[list[Any]] = [[] for _ in range(m)]
        else:
            F_rows = _as_rows(F)
        if len(F_rows) != m:
            raise InvalidLattice("E and F must have the same number of rows")
        self.m = m
        self.n1 = len(E_rows[0]) if m else 0
        self.n2 = len(F_rows[0]) if m else 0
        self.E = R.to_float_array(E_rows).reshape(m, self.n1)
        self.F = R.to_float_array(F_rows).reshape(m, self.n2)
        self.E_exact = R.try_exact_mat(E_rows) if self.n1 else tuple(() for _ in range(m))
        self.F_exact = R.try_exact_mat(F_rows) if self.n2 else tuple(() for _ in range(m))
        if self.E_exact is None or self.F_exact is None:
            self.E_exact = self.F_exact = None
        self._check_rank()

    @property
    def exact(self) -> bool:
        return self.E_exact is not None

    @property
    def full_dimensional(self) -> bool:
        return self.n1 + self.n2 == self.m

    def _check_rank(self) -> None:
        k = self.n1 + self.n2
        if k == 0:
            return
        if k > self.m:
            raise InvalidLattice("more generators than ambient dimension")
        if self.exact:
            full = tuple(tuple(self.E_exact[i]) + tuple(self.F_exact[i]) for i in range(self.m))
            r = R.rank(full)
        else:
            r = np.linalg.matrix_rank(np.hstack([self.E, self.F]))
        if r < k:
            raise InvalidLattice("columns of [E F] are linearly dependent")

    def __repr__(self) -> str:
        return f"MixedLattice(m={self.m}, n1={self.n1}, n2={self.n2})"


def _as_rows(A: Any) -> list[list[Any]]:
    if isinstance(A, np.ndarray):
        A = A.tolist() if A.ndim == 2 else [[v] for v in A.tolist()]
    rows = [list(r) if isinstance(r, (list, tuple, np.ndarray)) else [r] for r in A]
    return rows


def _projector_complement_exact(F: R.FMat, m: int) -> R.FMat:
    """I - F (F^T F)^{-1} F^T in exact arithmetic."""
    if not F or not F[0]:
        return R.identity(m)
    Ft = R.transpose(F)
    P = R.matmul(R.matmul(F, R.inverse(R.matmul(Ft, F))), Ft)
    return R.sub(R.identity(m), P)


def _projector_complement_float(F: np.ndarray) -> np.ndarray:
    m = F.shape[0]
    if F.shape[1] == 0:
        return np.eye(m)
    Qf, _ = np.linalg.qr(F)
    return np.eye(m) - Qf @ Qf.T


def orthogonal_representation(lat: MixedLattice) -> MixedLattice:
    """Replace E by (I - P_F) E, which generates the same mixed lattice."""
    if lat.n2 == 0:
        return lat
    if lat.exact:
        P = _projector_complement_exact(lat.F_exact, lat.m)
        E2 = R.matmul(P, lat.E_exact) if lat.n1 else tuple(() for _ in range(lat.m))
        return MixedLattice([list(r) for r in E2], [list(r) for r in lat.F_exact])
    P = _projector_complement_float(lat.F)
    return MixedLattice(P @ lat.E, lat.F)


def _gram(lat: MixedLattice) -> R.FMat | np.ndarray:
    """Gram matrix of the integer generators after projecting out F."""
    ortho = orthogonal_representation(lat)
    if ortho.exact:
        return R.matmul(R.transpose(ortho.E_exact), ortho.E_exact)
    return ortho.E.T @ ortho.E


def covering_radius(lat: MixedLattice) -> CoveringRadius:
    if not lat.full_dimensional:
        raise InvalidLattice("covering radius needs a full-dimensional lattice")
    if lat.n1 == 0:
        return CoveringRadius(0.0, 0.0, True, CoverMethod.ORTHOGONAL_BOX, Fraction(0))
    return covering_radius_from_gram(_gram(lat))


def covering_radius_from_gram(G: Any) -> CoveringRadius:
    """Covering radius of the lattice with Gram matrix G (any basis B with B^T B = G)."""
    exact = R.try_exact_mat(G) if not isinstance(G, np.ndarray) or G.dtype.kind in "iuO" else None
    Gf = R.to_float_array(G) if exact is None else R.as_float(exact)
    k = Gf.shape[0]
    if k == 0:
        return CoveringRadius(0.0, 0.0, True, CoverMethod.ORTHOGONAL_BOX, Fraction(0))
    if exact is not None:
        off_zero = all(exact[i][j] == 0 for i in range(k) for j in range(k) if i != j)
    else:
        scale = np.max(np.abs(np.diag(Gf)))
        off_zero = bool(np.all(np.abs(Gf - np.diag(np.diag(Gf))) <= 1e-15 * scale))
    if off_zero:
        if exact is not None:
            sq = sum((exact[i][i] for i in range(k)), Fraction(0)) / 4
            v = R.sqrt_float(sq)
            return CoveringRadius(v, v, True, CoverMethod.ORTHOGONAL_BOX, sq)
        v = 0.5 * math.sqrt(float(np.trace(Gf)))
        return CoveringRadius(v, v, True, CoverMethod.ORTHOGONAL_BOX)
    if k == 2:
        return _superbase_2d(exact if exact is not None else Gf)
    return _nearest_plane_bracket(exact, Gf)


def _lagrange_reduce(g11, g12, g22):
    """Gauss-Lagrange reduction on a 2x2 Gram matrix, ending with g12 <= 0."""
    for _ in range(10_000):
        if g11 > g22:
            g11, g22 = g22, g11
        if g11 == 0:
            raise InvalidLattice("degenerate Gram matrix")
        t = g12 / g11
        k = round(t)
        if k == 0:
            break
        g22 = g22 - 2 * k * g12 + k * k * g11
        g12 = g12 - k * g11
    if g12 > 0:
        g12 = -g12
    return g11, g12, g22


def _superbase_2d(G) -> CoveringRadius:
    """Exact 2D covering radius: circumradius of the non-obtuse Delaunay triangle.

    After reduction with g12 <= 0, (b1, b2, -b1-b2) is an obtuse superbase and the
    triangle 0, b1, b1+b2 has no obtuse angle, so its circumcentre is a deep hole.
    """
    g11, g12, g22 = G[0][0], G[0][1], G[1][1]
    g11, g12, g22 = _lagrange_reduce(g11, g12, g22)
    d = g11 * g22 - g12 * g12
    third = g11 + 2 * g12 + g22
    if isinstance(g11, Fraction):
        sq = g11 * g22 * third / (4 * d)
        v = R.sqrt_float(sq)
        return CoveringRadius(v, v, True, CoverMethod.OBTUSE_SUPERBASE_2D, sq)
    v = math.sqrt(g11 * g22 * third / (4 * d))
    return CoveringRadius(v, v, True, CoverMethod.OBTUSE_SUPERBASE_2D)


def _pairwise_reduce(G: np.ndarray | R.FMat, exact: bool):
    """Greedy pairwise size reduction on a Gram matrix; returns (G, unimodular T) with G_new = T^T G T."""
    k = len(G)
    G = [list(r) for r in G]
    T = [[int(i == j) for j in range(k)] for i in range(k)]
    changed = True
    sweeps = 0
    while changed and sweeps < 200:
        changed = False
        sweeps += 1
        for i in range(k):
            for j in range(k):
                if i == j or G[i][i] == 0:
                    continue
                q = round(G[i][j] / G[i][i])
                if q == 0:
                    continue
                # b_j <- b_j - q b_i
                new_jj = G[j][j] - 2 * q * G[i][j] + q * q * G[i][i]
                if not new_jj < G[j][j]:
                    continue
                for t in range(k):
                    if t != j:
                        G[j][t] = G[j][t] - q * G[i][t]
                        G[t][j] = G[j][t]
                G[j][j] = new_jj
                for t in range(k):
                    T[t][j] -= q * T[t][i]
                changed = True
    order = sorted(range(k), key=lambda i: (G[i][i], i))
    G = [[G[a][b] for b in order] for a in order]
    T = [[T[r][c] for c in order] for r in range(k)]
    return G, T


def _unit_ball_volume(k: int) -> float:
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def _nearest_plane_bracket(exact: R.FMat | None, Gf: np.ndarray) -> CoveringRadius:
    k = Gf.shape[0]
    if exact is not None:
        G, _ = _pairwise_reduce(exact, True)
        G = R.fmat(G)
        _, D = R.ldl(G)
        sq_sum = sum(D, Fraction(0))
        upper = 0.5 * R.sqrt_float(sq_sum) + UPPER_SLACK
        detG = R.det(G)
        lower_proj = 0.0
        for i in range(k):
            idx = [j for j in range(k) if j != i]
            minor = R.det(tuple(tuple(G[a][b] for b in idx) for a in idx))
            lower_proj = max(lower_proj, 0.5 * R.sqrt_float(detG / minor))
        detf = float(detG)
        Gfl = R.as_float(G)
    else:
        G, _ = _pairwise_reduce(Gf.tolist(), False)
        Gfl = np.array(G, dtype=float)
        L = np.linalg.cholesky(Gfl)
        D = np.diag(L) ** 2
        upper = 0.5 * math.sqrt(float(D.sum())) * (1 + 1e-12) + UPPER_SLACK
        detf = float(np.prod(D))
        lower_proj = 0.0
        for i in range(k):
            idx = [j for j in range(k) if j != i]
            minor = np.linalg.det(Gfl[np.ix_(idx, idx)])
            lower_proj = max(lower_proj, 0.5 * math.sqrt(detf / minor))
    lower_vol = (math.sqrt(detf) / _unit_ball_volume(k)) ** (1.0 / k)
    # distance of the half-sum point to the lattice is attained, hence a lower bound
    centre = np.full(k, 0.5)
    z, d2 = _cvp_gram(Gfl, centre)
    lower_hole = math.sqrt(max(d2, 0.0))
    lower = min(max(lower_proj, lower_vol, lower_hole) * (1 - 1e-12), upper)
    return CoveringRadius(lower, upper, False, CoverMethod.NEAREST_PLANE_UPPER)


def nearest_plane_bracket(G: Any) -> CoveringRadius:
    """Nearest-plane bracket for any Gram matrix, skipping the exact special cases."""
    exact = R.try_exact_mat(G) if not isinstance(G, np.ndarray) or G.dtype.kind in "iuO" else None
    Gf = R.to_float_array(G) if exact is None else R.as_float(exact)
    return _nearest_plane_bracket(exact, Gf)


def _cvp_gram(G: np.ndarray, c: np.ndarray, radius_sq: float | None = None) -> tuple[tuple[int, ...], float]:
    """Closest integer vector z to c in the metric (z-c)^T G (z-c).

    Schnorr-Euchner style depth-first enumeration on the Cholesky factor;
    ties within a relative 1e-12 are broken lexicographically on z.
    """
    k = len(c)
    Rm = np.linalg.cholesky(G).T  # upper, G = Rm^T Rm
    if radius_sq is None:
        z0 = np.rint(c)
        diff = z0 - c
        radius_sq = float(diff @ G @ diff)
    bound = radius_sq * (1 + 1e-9) + 1e-12
    found: list[tuple[float, tuple[int, ...]]] = []
    z = np.zeros(k)

    def rec(level: int, partial: float) -> None:
        nonlocal bound
        # centre for coordinate `level` given the fixed coordinates level+1..k-1
        s = c[level] - sum(Rm[level, j] * (z[j] - c[j]) for j in range(level + 1, k)) / Rm[level, level]
        rll = Rm[level, level]
        span = math.sqrt(max(bound - partial, 0.0)) / abs(rll)
        lo = math.ceil(s - span - 1e-12)
        hi = math.floor(s + span + 1e-12)
        for v in range(lo, hi + 1):
            t = rll * (v - s)
            p = partial + t * t
            if p > bound:
                continue
            z[level] = v
            if level == 0:
                found.append((p, tuple(int(x) for x in z)))
                if p < bound:
                    bound = p * (1 + 1e-9) + 1e-15
            else:
                rec(level - 1, p)
        z[level] = 0

    rec(k - 1, 0.0)
    best = min(d for d, _ in found)
    tol = _TIE_TOL * (1 + best)
    ties = [zz for d, zz in found if d <= best + tol]
    zbest = min(ties)
    diff = np.array(zbest, dtype=float) - c
    return zbest, float(diff @ G @ diff)


def closest_lattice_point(lat: MixedLattice, target: Sequence[float]) -> LatticePoint:
    """Exact closest point of L(E, F) to ``target``.

    The F part is absorbed by projecting onto span(F)^perp; the integer
    coordinates z then solve a CVP in the projected lattice.
    """
    if not lat.full_dimensional:
        raise InvalidLattice("closest point search needs a full-dimensional lattice")
    t = np.asarray(R.to_float_array(list(target)), dtype=float)
    ortho = orthogonal_representation(lat)
    P = _projector_complement_float(lat.F)
    tp = P @ t
    if lat.n1 == 0:
        y = np.linalg.lstsq(lat.F, t, rcond=None)[0]
        return LatticePoint(lat.F @ y, (), y, 0.0)
    Ep = ortho.E
    G = Ep.T @ Ep
    c = np.linalg.solve(G, Ep.T @ tp)
    z, d2 = _cvp_gram(G, c)
    zf = np.array(z, dtype=float)
    rest = t - lat.E @ zf
    if lat.n2:
        y = np.linalg.lstsq(lat.F, rest, rcond=None)[0]
    else:
        y = np.zeros(0)
    point = lat.E @ zf + lat.F @ y
    dist = float(np.linalg.norm(point - t))
    return LatticePoint(point, z, y, dist)


def ellipsoid_contains_lattice_point(lat: MixedLattice, center: Sequence[float], r: float) -> ContainmentResult:
    """Decide whether the ball of radius r around ``center`` meets L(E, F)."""
    cr = covering_radius(lat)
    nearest = closest_lattice_point(lat, center)
    if r >= cr.upper:
        return ContainmentResult(True, nearest, cr)
    inside = nearest.distance <= r + 1e-12 * (1 + r)
    return ContainmentResult(inside, nearest if inside else None, cr)


def deep_hole_grid_search(G: np.ndarray, resolution: int = 200) -> float:
    """Max over a grid of the fundamental parallelepiped of the distance to the lattice.

    A slow reference used by tests; always a lower bound on the covering radius.
    The basis is pairwise-reduced first so the nearest lattice point of any grid
    point lies among the translates by coefficients in {-1, 0, 1, 2}.
    """
    Gr, _ = _pairwise_reduce(np.asarray(G, dtype=float).tolist(), False)
    Gr = np.array(Gr, dtype=float)
    k = Gr.shape[0]
    Rm = np.linalg.cholesky(Gr).T
    grid = (np.arange(resolution) + 0.5) / resolution
    shifts = np.array(list(itertools.product((-1, 0, 1, 2), repeat=k)), dtype=float)
    pts = np.array(list(itertools.product(grid, repeat=k)))
    best = 0.0
    for chunk in np.array_split(pts, max(1, len(pts) // 20000)):
        diffs = (chunk[:, None, :] - shifts[None, :, :]) @ Rm.T
        d2 = np.sum(diffs * diffs, axis=-1)
        best = max(best, float(np.sqrt(d2.min(axis=1)).max()))
    return best
