import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from checks import ball_inside, branch_separates, ellipsoid_inside, random_two_sheet
from oracles import psi_grid_2d, quad_residual
from proxgap.errors import (InfeasibleAnchor, InvalidBranch, InvalidRegularizer, NoFullDimRecessionCone,
                            NoLargeBalls, NotAQuadricOfInterest, WrongQuadricClass)
from proxgap.generators import FuzzClass, random_instance, random_set
from proxgap.quadric import (BranchRegime, QuadricKind, QuadricSet, SocrSet, ball_shift, branch_bounds,
                             check_lineality_trivial, classify, inner_ellipsoid, psi_constant, qr_to_er,
                             socr_to_er, socr_to_qr)

DISK = ([[1, 0], [0, 1]], [0, 0], -1)
PARABOLA = ([[1, 0], [0, 0]], [0, Fraction(1, 2)], 0)
HYPERBOLA = ([[1, 0], [0, -1]], [0, 0], 1)


class TestClassify:
    def test_unit_disk(self):
        c = classify(QuadricSet(*DISK))
        assert c.kind is QuadricKind.ELLIPSOID
        assert c.qstar_exact == 1
        assert np.allclose(c.center, 0)
        assert str(c) == "Ellipsoid q*=1"

    def test_parabola(self):
        assert classify(QuadricSet(*PARABOLA)).kind is QuadricKind.PARABOLOID

    def test_two_sheet(self):
        c = classify(QuadricSet(*HYPERBOLA))
        assert c.kind is QuadricKind.TWO_SHEET_HYPERBOLOID
        assert c.qstar_exact == -1

    def test_two_sheet_has_two_components(self):
        # y^2 >= x^2 + 1: sampled feasible points never have |y| < 1
        rng = np.random.default_rng(0)
        X = rng.uniform(-5, 5, size=(20000, 2))
        q = QuadricSet(*HYPERBOLA)
        feas = X[q.residuals(X) <= 0]
        assert len(feas) > 100
        assert np.all(np.abs(feas[:, 1]) >= 1)

    @pytest.mark.parametrize("M,beta,gamma,kind", [
        ([[1, 0], [0, 1]], [0, 0], 0, QuadricKind.SINGLETON),
        ([[1, 0], [0, 1]], [0, 0], 1, QuadricKind.EMPTY),
        ([[1, 0], [0, -1]], [0, 0], 0, QuadricKind.TRANSLATED_CONE),
        ([[1, 0], [0, -1]], [0, 0], -1, QuadricKind.ONE_SHEET_HYPERBOLOID),
        ([[1, 0], [0, 0]], [1, 0], -1, QuadricKind.CYLINDER),
        ([[1, 0], [0, 0]], [0, 0], 0, QuadricKind.LINE),
    ])
    def test_other_kinds(self, M, beta, gamma, kind):
        assert classify(QuadricSet(M, beta, gamma)).kind is kind

    def test_two_negative_eigenvalues(self):
        with pytest.raises(NotAQuadricOfInterest):
            classify(QuadricSet([[-1, 0], [0, -1]], [0, 0], 1))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(list(FuzzClass)), st.sampled_from([1e-3, 1e3]))
    def test_scale_consistent(self, seed, cls, t):
        q, _ = random_set(np.random.default_rng(seed), cls, 2 + seed % 2)
        scaled = QuadricSet(t * q.M, t * q.beta, t * q.gamma)
        assert classify(scaled).kind is classify(QuadricSet(q.M, q.beta, q.gamma)).kind


class TestBranchBounds:
    def test_hyperbola_along_axis(self):
        bb = branch_bounds(QuadricSet(*HYPERBOLA), [0, 1], 0)
        assert bb.gMg == -1
        assert (bb.h_minus, bb.h_plus) == (-1, 1)
        assert bb.separates

    def test_asymptotic(self):
        assert branch_bounds(QuadricSet(*HYPERBOLA), [1, 1]).regime is BranchRegime.ASYMPTOTIC

    def test_cone_apex(self):
        bb = branch_bounds(QuadricSet([[1, 0], [0, -1]], [0, 0], 0), [0, 1], 0)
        assert bb.separates

    def test_non_separating_branch_rejected(self):
        with pytest.raises(InvalidBranch):
            QuadricSet(*HYPERBOLA, ([0, 1], 2))

    def test_zero_normal_rejected(self):
        with pytest.raises(InvalidBranch):
            QuadricSet(*HYPERBOLA, ([0, 0], 0))

    def test_wrong_class(self):
        with pytest.raises(WrongQuadricClass):
            branch_bounds(QuadricSet(*DISK), [0, 1])


def test_branch_separation_property():
    rng = np.random.default_rng(11)
    for i in range(60):
        q, g = random_two_sheet(rng, 2 + i % 2)
        assert branch_separates(q, g, rng)


class TestPsi:
    def test_hyperbola(self):
        # the largest ball around a unit direction of the 90 degree cone has radius sin(45)
        assert psi_constant(QuadricSet(*HYPERBOLA, ([0, 1], 0))) == pytest.approx(math.sqrt(0.5))

    def test_lorentz_3d(self):
        q = QuadricSet([[1, 0, 0], [0, 1, 0], [0, 0, -1]], [0, 0, 0], 0, ([0, 0, 1], 0))
        assert psi_constant(q) == pytest.approx(math.sqrt(0.5))

    def test_one_dimensional(self):
        q = QuadricSet([[-1]], [0], 1, ([1], 0))
        assert psi_constant(q) == 1.0

    def test_narrow_cone(self):
        q = QuadricSet([[16, 0], [0, -1]], [0, 0], 0, ([0, 1], 0))
        assert psi_constant(q) == pytest.approx(1 / math.sqrt(17))

    def test_bounded_set(self):
        with pytest.raises(NoFullDimRecessionCone):
            psi_constant(QuadricSet(*DISK))

    @pytest.mark.parametrize("M", [[[1, 0], [0, -1]], [[16, 0], [0, -1]], [[1, 0], [0, -4]], [[2, 3], [3, -1]],
                                   [[5, 1], [1, -2]]])
    def test_matches_grid_max_min(self, M):
        w, V = np.linalg.eigh(np.array(M, dtype=float))
        q = QuadricSet(M, [0, 0], 0, (V[:, 0].tolist(), 0))
        assert abs(psi_constant(q) - psi_grid_2d(M, V[:, 0])) < 1e-3


class TestBallShift:
    def test_parabola(self):
        theta, u = ball_shift(QuadricSet(*PARABOLA), (0, 0), 0.5)
        assert theta == pytest.approx(0.75)
        assert np.allclose(u, (0, 1))

    def test_parabola_contains_ball(self):
        q = QuadricSet(*PARABOLA)
        assert ball_inside(q, np.array([0, 0.75]), 0.5, np.random.default_rng(0))

    def test_zero_radius(self):
        theta, _ = ball_shift(QuadricSet(*PARABOLA), (0, 0), 1e-12)
        assert theta < 1e-9

    def test_cone(self):
        q = QuadricSet([[1, 0], [0, -1]], [0, 0], 0, ([0, 1], 0))
        theta, u = ball_shift(q, (0, 0), 1)
        assert theta == pytest.approx(1 + math.sqrt(2))
        assert ball_inside(q, theta * u, 1, np.random.default_rng(1))

    def test_bounded(self):
        with pytest.raises(NoLargeBalls):
            ball_shift(QuadricSet(*DISK), (0, 0), 1)

    def test_infeasible_anchor(self):
        with pytest.raises(InfeasibleAnchor):
            ball_shift(QuadricSet(*PARABOLA), (0, -1), 1)

    @pytest.mark.parametrize("cls", [FuzzClass.PARABOLOID, FuzzClass.HYPERBOLOID, FuzzClass.CONE])
    def test_random_sets(self, cls):
        rng = np.random.default_rng(3)
        for i in range(30):
            inst = random_instance(rng, cls, 2 + i % 2)
            x0 = inst.relaxation.optimizer
            r = float(rng.uniform(0.2, 3))
            theta, u = ball_shift(inst.set, x0, r)
            assert ball_inside(inst.set, x0 + theta * u, r, rng, k=2000)


class TestInnerEllipsoid:
    def test_disk_is_itself(self):
        e = inner_ellipsoid(QuadricSet(*DISK), (1, 0), np.eye(2))
        assert np.allclose(e.center, 0) and e.r == pytest.approx(1)

    def test_parabola(self):
        e = inner_ellipsoid(QuadricSet(*PARABOLA), (1, 1), np.eye(2))
        assert np.allclose(e.center, (0, 1.5))
        assert e.r == pytest.approx(math.sqrt(5) / 2)
        assert ball_inside(QuadricSet(*PARABOLA), np.array([0, 1.5]), math.sqrt(5) / 2, np.random.default_rng(0))

    def test_interior_anchor(self):
        e = inner_ellipsoid(QuadricSet(*DISK), (0.3, 0.1), np.eye(2))
        assert e.r > 0
        # the anchor sits on the boundary of the inner ellipsoid
        assert np.linalg.norm(e.Q @ np.array([0.3, 0.1]) - e.p) == pytest.approx(e.r)

    def test_bad_regularizer(self):
        with pytest.raises(InvalidRegularizer):
            inner_ellipsoid(QuadricSet(*DISK), (1, 0), 0.5 * np.eye(2))

    def test_random(self):
        rng = np.random.default_rng(5)
        for i in range(40):
            cls = list(FuzzClass)[i % 4]
            inst = random_instance(rng, cls, 2 + i % 2)
            q = inst.set
            lam = max(q.lambda_1, 1e-3)
            D = math.sqrt(lam) * np.eye(q.n) * float(rng.uniform(1, 2))
            e = inner_ellipsoid(q, inst.relaxation.optimizer, D)
            assert ellipsoid_inside(q, e, rng, k=2000)


class TestRepresentations:
    def test_unit_disk_socr(self):
        q = socr_to_qr(SocrSet([[1, 0], [0, 1]], [0, 0], [0, 0], -1))
        assert q.exact.M == ((1, 0), (0, 1)) and q.exact.beta == (0, 0) and q.exact.gamma == -1
        assert not q.has_branch

    def test_parabola_from_lorentz_encoding(self):
        # ||(2 x1, x2 - 1)|| <= x2 + 1 squares to 4 x1^2 <= 4 x2
        q = socr_to_qr(SocrSet([[2, 0], [0, 1]], [0, 1], [0, 1], -1))
        assert q.exact.M == ((4, 0), (0, 0))
        assert q.exact.beta == (0, 2)
        assert q.exact.gamma == 0
        assert classify(q).kind is QuadricKind.PARABOLOID

    def test_ex0_constraint_form(self):
        N = 2
        b1, b2, d = Fraction(8 * N + 1, 2), Fraction(4 * N), Fraction(4 * N) - Fraction(1, 4 * N)
        s = SocrSet([[1, 0], [0, Fraction(1, 2)]], [b1, b2], [0, Fraction(1, 2)], d)
        q = socr_to_qr(s)
        rng = np.random.default_rng(0)
        for x in rng.integers(-20, 40, size=(50, 2)):
            lhs = (x[0] - b1) ** 2 + (b2 * b2 - d * d)
            rhs = (b2 - d) * int(x[1])
            # the squared form is 4x the printed one once the x2 terms are collected
            assert quad_residual(q.exact.M, q.exact.beta, q.exact.gamma, x) == lhs - rhs

    def test_qr_to_er_identity(self):
        e = qr_to_er(QuadricSet(*DISK))
        assert np.allclose(e.Q, np.eye(2)) and np.allclose(e.p, 0) and e.r == pytest.approx(1)

    @pytest.mark.parametrize("N", [4, 8])
    def test_qr_to_er_case1_radius(self, N):
        c = Fraction(1, 2) + Fraction(1, N)
        R = Fraction(N, 2) - 1
        e = qr_to_er(QuadricSet([[1, 0], [0, N * N]], [0, N * N * c], N * N * c * c - R * R))
        assert e.r == pytest.approx(N * (0.5 - 1 / N))

    def test_qr_to_er_radius_two(self):
        rng = np.random.default_rng(2)
        A = rng.normal(size=(3, 3))
        M = A @ A.T + np.eye(3)
        beta = rng.normal(size=3)
        gamma = beta @ np.linalg.solve(M, beta) - 4
        q = QuadricSet(M, beta, gamma)
        e = qr_to_er(q)
        assert e.r == pytest.approx(2)
        X = rng.normal(size=(1000, 3)) * 3
        for x in X:
            assert q.contains(x) == e.contains(x)

    def test_unbounded_socr_to_er(self):
        with pytest.raises(WrongQuadricClass):
            socr_to_er(SocrSet([[2, 0], [0, 1]], [0, 1], [0, 1], -1))

    def test_membership_round_trip(self):
        rng = np.random.default_rng(4)
        done = 0
        while done < 100:
            n = 2 + done % 2
            A = rng.integers(-3, 4, size=(n, n))
            c = rng.integers(-1, 2, size=n)
            if np.linalg.eigvalsh(A.T @ A - np.outer(c, c))[0] <= 0.1:
                continue
            s = SocrSet(A.tolist(), rng.integers(-3, 4, size=n).tolist(), c.tolist(), int(rng.integers(-5, 1)))
            q = socr_to_qr(s)
            if classify(q).kind is not QuadricKind.ELLIPSOID:
                continue
            e = qr_to_er(q)
            ctr = e.center
            X = ctr + rng.normal(size=(1000, n)) * (e.r / np.linalg.svd(e.Q, compute_uv=False).min() + 1)
            slack = np.array([s.slack(x) for x in X])
            qres = q.residuals(X)
            eres = np.linalg.norm(X @ e.Q.T - e.p, axis=1) - e.r
            clear = np.abs(slack) > 1e-8
            assert np.all((slack[clear] >= 0) == (qres[clear] <= 0))
            assert np.all((qres[clear] <= 0) == (eres[clear] <= 0))
            done += 1


class TestLineality:
    def test_parabola(self):
        assert check_lineality_trivial(QuadricSet(*PARABOLA))

    def test_cylinder(self):
        q = QuadricSet([[1, 0], [0, 0]], [1, 0], -1)
        assert not check_lineality_trivial(q)
        for x1 in (-0.5, 0.0, 1.5):
            vals = {q.contains((x1, t)) for t in (-100, 0, 7, 1e4)}
            assert len(vals) == 1

    def test_bounded(self):
        assert check_lineality_trivial(QuadricSet(*DISK))
