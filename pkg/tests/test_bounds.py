import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from checks import ball_inside
from oracles import brute_nearest, quad_pred, scipy_min_quadratic
from proxgap.bounds import (BoundKind, TwoSphereInstance, all_bounds, ceil_safe, ig_bound_ellipsoid,
                            ig_bound_slice, ig_bound_two_sphere, prox_bound_ellipsoid, prox_bound_full_dim_cone,
                            prox_bound_paraboloid, prox_bound_paraboloid_large_tangent, slice_coefficients,
                            two_sphere_geometry, two_sphere_width_gain, two_sphere_relaxation)
from proxgap.errors import BoundNotApplicable, InfeasibleIntegerSet, NoFullDimRecessionCone
from proxgap.families import build
from proxgap.generators import FuzzClass, random_instance
from proxgap.oracle import proximity_exact, solve_ip_exact
from proxgap.quadric import Ellipsoid, QuadricSet
from proxgap.relax import delta_inf, normalize_objective

DISK = QuadricSet([[1, 0], [0, 1]], [0, 0], -1)


def by_id(reports):
    return {r.formula: r for r in reports}


class TestEllipsoid:
    def test_unit_disk(self):
        assert prox_bound_ellipsoid(DISK).value == pytest.approx(math.sqrt(2))
        assert ig_bound_ellipsoid(DISK, (0, 1)).value == pytest.approx(math.sqrt(2))

    def test_no_integer_point(self):
        with pytest.raises(InfeasibleIntegerSet):
            prox_bound_ellipsoid(Ellipsoid([[1, 0], [0, 1]], [0.5, 0.5], 0.3))

    def test_rescaled_representation(self):
        # scaling Q and r together keeps the set; mu doubles while ||Q^-T alpha|| halves
        base = Ellipsoid([[1, 0], [0, 1]], [0, 0], 3)
        wide = Ellipsoid([[2, 0], [0, 2]], [0, 0], 6)
        assert prox_bound_ellipsoid(base).mu_used.upper < prox_bound_ellipsoid(wide).mu_used.upper
        assert ig_bound_ellipsoid(base, (1, 1)).value == pytest.approx(ig_bound_ellipsoid(wide, (1, 1)).value)

    @pytest.mark.parametrize("N", [4, 6, 8])
    def test_case1_values(self, N):
        inst = build("case1", N)
        b = by_id(all_bounds(inst.primary, inst.alpha))
        assert b["ig.slice.ellipsoid.case1"].value == pytest.approx(1 - 2 / N)
        assert b["ig.slice.ellipsoid.case1.weak"].value == pytest.approx(2 * math.sqrt(0.25 / N ** 2 + 0.25))
        assert b["ig.ellipsoid"].value == pytest.approx(math.sqrt(1 + 1 / N ** 2) * 1.0)

    def test_case2_values(self):
        inst = build("case2", 4)
        b = by_id(all_bounds(inst.primary, inst.alpha))
        assert b["ig.slice.ellipsoid.case2"].value == pytest.approx(0.9375)
        assert b["ig.slice.ellipsoid.case2.ceil-relaxed"].value == pytest.approx(1.0114591358505018, rel=1e-9)
        assert b["ig.ellipsoid"].value == pytest.approx(math.sqrt(17) / 4)
        assert b["ig.slice.ellipsoid.case2.weak"].value == pytest.approx(1.125)
        assert float(inst.closed_form_ig) == pytest.approx(0.9375)


class TestCones:
    def test_lorentz(self):
        q = QuadricSet([[1, 0], [0, -1]], [0, 0], 0, ([0, 1], 0))
        assert prox_bound_full_dim_cone(q).value == pytest.approx(math.sqrt(2) / 2 * (math.sqrt(2) + 1))

    def test_no_negative_eigenvalue(self):
        q = QuadricSet([[1, 0], [0, 0]], [0, Fraction(1, 2)], 0)
        with pytest.raises(NoFullDimRecessionCone):
            prox_bound_full_dim_cone(q)

    def test_narrow_cone_needs_the_axis_angle(self):
        # 16 (x1 - 1/2)^2 <= (x2 - 1/2)^2 above the apex (1/2, 1/2)
        q = QuadricSet([[16, 0], [0, -1]], [8, Fraction(-1, 2)], Fraction(15, 4), ([0, 1], Fraction(1, 2)))
        prox = proximity_exact([q], (0.5, 0.5), radius_cap=5)
        ref = brute_nearest([quad_pred(q.exact.M, q.exact.beta, q.exact.gamma, ([0, 1], Fraction(1, 2)))],
                            (0.5, 0.5), [(-5, 6), (-5, 6)])
        assert prox.distance == pytest.approx(ref[0])
        eigen_only = math.sqrt(2) / 2 * (1 - q.lambda_n / 16)  # the eigenvalue-only form scaled to lambda_1 = 1
        assert prox.distance > eigen_only
        assert prox.distance <= prox_bound_full_dim_cone(q).value


class TestParaboloid:
    def test_ex0_slice_values(self):
        inst = build("ex0", 1)
        b = by_id(all_bounds(inst.primary, inst.alpha))
        assert b["ig.slice.paraboloid"].value_exact == Fraction(29, 16)
        assert b["ig.slice.paraboloid.weak"].value_exact == 2
        assert inst.closed_form_ig == Fraction(13, 16)

    def test_parabola_vertex(self):
        q = QuadricSet([[1, 0], [0, 0]], [0, Fraction(1, 2)], 0)
        rep = prox_bound_paraboloid(q, (0, 0))
        # the closed-form shift for x1^2 <= x2 is r + r^2, and the bound adds r
        r = math.sqrt(2) / 2
        assert rep.details["theta"] == pytest.approx(r + r * r)
        assert rep.value == pytest.approx(2 * r + r * r)
        assert ball_inside(q, (0, rep.details["theta"]), r, np.random.default_rng(0))
        assert prox_bound_paraboloid_large_tangent(q, (0, 0)) is None

    def test_large_tangent(self):
        q = QuadricSet([[1, 0], [0, 0]], [0, Fraction(1, 2)], 0)
        assert prox_bound_paraboloid_large_tangent(q, (3, 9)).value == pytest.approx(math.sqrt(2))


class TestSlices:
    def test_radius_matches_scipy(self):
        # r^2(delta) is minus the minimum of the residual over the slice x_n = delta
        rng = np.random.default_rng(31)
        for i in range(30):
            cls = (FuzzClass.ELLIPSOID, FuzzClass.PARABOLOID)[i % 2]
            inst = random_instance(rng, cls, 3)
            q = normalize_objective(inst.set, inst.alpha).set
            sc = slice_coefficients(q)
            d = float(rng.uniform(-3, 3))
            M, b = q.M, q.beta
            H = M[:-1, :-1]
            g = 2 * d * M[:-1, -1] - 2 * b[:-1]
            c = M[-1, -1] * d * d - 2 * b[-1] * d + q.gamma
            assert sc.r2(d) == pytest.approx(-scipy_min_quadratic(H, g, c), rel=1e-6, abs=1e-6)

    def test_slice_needs_unique_optimum(self):
        cone = QuadricSet([[1, 0], [0, -1]], [0, 0], 0, ([0, 1], 0))
        ni = normalize_objective(cone, (-1, 1))
        with pytest.raises(Exception):
            ig_bound_slice(ni.set)

    def test_ceil_safe(self):
        assert ceil_safe(2.0000000001) == 2
        assert ceil_safe(2.1) == 3
        assert ceil_safe(Fraction(7, 2)) == 4


class TestTwoSphere:
    @pytest.mark.parametrize("N", range(1, 9))
    def test_ex7_bound(self, N):
        inst = build("ex7", N)
        assert ig_bound_two_sphere(inst.primary).value == math.ceil(0.5 * math.sqrt(4 * N + 1) - 1e-9)

    def test_geometry(self):
        t = TwoSphereInstance(2, 2, 2, 2, (0, 1))
        H, h, W = two_sphere_geometry(t)
        assert W == pytest.approx(1)
        assert H == pytest.approx(math.sqrt(3))
        # chord at width 1 centered on the lens: x1 in [0.5, 1.5]
        assert h == pytest.approx(math.sqrt(4 - 1.5 ** 2))

    def test_h_missing_when_lens_too_thin(self):
        t = TwoSphereInstance(1, 1, 1.9, 2)
        assert two_sphere_geometry(t)[1] is None

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.5, 10), st.floats(0.5, 10), st.floats(0.1, 10))
    def test_rim_height_property(self, r1, r2, p):
        t = TwoSphereInstance(r1, r2, p, 2)
        if not t.nonempty or abs(r1 - r2) >= p:
            return
        H, _, W = two_sphere_geometry(t)
        assert t.contains((W, H), tol=1e-7)
        assert t.contains((W, -H), tol=1e-7)
        assert not t.contains((W, H * 1.001 + 1e-6), tol=0)

    def test_relaxation_rim(self):
        t = TwoSphereInstance(3, 2, 4, 2, (0, 1))
        rel = two_sphere_relaxation(t)
        H, _, W = two_sphere_geometry(t)
        assert rel.value == pytest.approx(-H)
        assert np.allclose(rel.optimizer, (W, -H))

    def test_width_gain(self):
        assert two_sphere_width_gain(3, 1) == pytest.approx(0.5 * math.sqrt(2))
        with pytest.raises(BoundNotApplicable):
            two_sphere_width_gain(1, 1)

    def test_not_applicable(self):
        with pytest.raises(BoundNotApplicable):
            ig_bound_two_sphere(TwoSphereInstance(1, 1, 1.5, 2, (0, 1)))


def _sound_on(inst, reports):
    """Every IG bound is at least the exact gap; every prox bound at least the distance."""
    rel = inst.relaxation
    ip = solve_ip_exact([inst.set], inst.alpha, level_bounds=(rel.value - 1e-7, None))
    assert ip.optimal
    gap = float(ip.value) - rel.value
    for r in reports:
        if r.kind is BoundKind.INTEGRALITY_GAP:
            assert gap <= r.value * (1 + 1e-9) + 1e-9, r.formula
        else:
            d = proximity_exact([inst.set], rel.optimizer, radius_cap=r.value + 1).distance
            assert d <= r.value * (1 + 1e-9) + 1e-9, r.formula


@pytest.mark.parametrize("cls", list(FuzzClass))
def test_soundness_sample(cls):
    rng = np.random.default_rng(41)
    for i in range(15):
        inst = random_instance(rng, cls, 2 + i % 2)
        _sound_on(inst, all_bounds(inst.set, inst.alpha, inst.relaxation))


def translate(q: QuadricSet, t) -> QuadricSet:
    return q.translated(t)


@pytest.mark.parametrize("cls", list(FuzzClass))
def test_rhs_independent_bounds_survive_integer_shifts(cls):
    rng = np.random.default_rng(51)
    for i in range(10):
        inst = random_instance(rng, cls, 2)
        base = {r.formula: r.value for r in all_bounds(inst.set, inst.alpha, inst.relaxation) if r.rhs_independent}
        t = rng.integers(-3, 4, size=2)
        moved = translate(inst.set, t)
        after = {r.formula: r.value for r in all_bounds(moved, inst.alpha) if r.rhs_independent}
        for fid, v in base.items():
            assert after[fid] == pytest.approx(v, rel=1e-9, abs=1e-9)


def test_delta_inf_matches_relaxation_on_families():
    for nm, N in [("case1", 4), ("case2", 4), ("ex0", 2)]:
        inst = build(nm, N)
        ni = normalize_objective(inst.primary, inst.alpha)
        assert float(ni.scale) * delta_inf(ni.set)[0] == pytest.approx(float(inst.relax_value))
