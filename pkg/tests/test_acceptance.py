"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also written through the terminal reporter when output is captured.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from checks import ball_inside, branch_separates, ellipsoid_inside, random_two_sheet
from oracles import covering_radius_grid_2d, psi_grid_2d
from proxgap.bounds import all_bounds, ig_bound_two_sphere
from proxgap.families import build
from proxgap.generators import FuzzClass, random_instance
from proxgap.lattice import MixedLattice, covering_radius, nearest_plane_bracket
from proxgap.oracle import IpStatus, solve_ip_exact
from proxgap.quadric import QuadricSet, ball_shift, inner_ellipsoid, psi_constant
from proxgap.report import evaluate

TOL = 1e-9


@pytest.fixture
def verdict(capsys):
    def emit(k: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nCriterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail
    return emit


def oracle_gap(inst):
    ip = solve_ip_exact(list(inst.sets), inst.alpha, level_bounds=inst.level_bounds)
    assert ip.status is IpStatus.OPTIMAL, (inst.name, inst.N, ip.certificate)
    if isinstance(ip.value, Fraction) and isinstance(inst.relax_value, Fraction):
        return ip.value - inst.relax_value
    return float(ip.value) - float(inst.relax_value)


# closed forms written out here rather than read back from the generators
CLOSED_FORMS = {
    "ex0": (range(1, 9), lambda N: N + Fraction(5, 16 * N) - Fraction(1, 2)),
    "ex10": (range(1, 9), lambda N: math.sqrt(N + 0.75)),
    "ex11": (range(1, 9), lambda N: math.sqrt(N) - 0.5),
    "ex7": (range(1, 9), lambda N: math.sqrt(N + 0.25 - 1 / (4 * N) - 1 / (16 * N * N))),
    "appendix:ex1": (range(1, 6), lambda N: N + Fraction(3, 4)),
    "appendix:ex2": (range(1, 6), lambda N: 2 * Fraction(1, 2) * N - Fraction(1, 4)),
    "appendix:ex3": (range(1, 6), lambda N: Fraction(N, 2) - Fraction(1, 16)),
    "appendix:ex4": (range(1, 6), lambda N: N + Fraction(3, 4)),
    "appendix:ex5": (range(1, 6), lambda N: N + Fraction(3, 4)),
    "appendix:ex6": (range(1, 6), lambda N: Fraction(N)),
    "appendix:ex8": (range(1, 6), lambda N: math.sqrt(N + 0.75)),
    "appendix:ex9": (range(1, 6), lambda N: math.sqrt(N + 0.75)),
}


def test_criterion_1_family_exactness(verdict):
    t0 = time.perf_counter()
    bad = []
    for name, (Ns, form) in CLOSED_FORMS.items():
        for N in Ns:
            inst = build(name, N)
            gap, want = oracle_gap(inst), form(N)
            if isinstance(gap, Fraction) and isinstance(want, Fraction):
                ok = gap == want
            else:
                ok = abs(float(gap) - float(want)) <= TOL
            if name == "ex7":
                ok &= ig_bound_two_sphere(inst.primary).value == math.ceil(0.5 * math.sqrt(4 * N + 1) - 1e-9)
            if not ok:
                bad.append((name, N, gap, want))
    elapsed = time.perf_counter() - t0
    verdict(1, not bad and elapsed < 60, f"{len(CLOSED_FORMS)} families, mismatches={bad}, {elapsed:.1f} s")


def _bounds(name, N):
    inst = build(name, N)
    return inst, {r.formula: r.value for r in all_bounds(inst.primary, inst.alpha)}


def test_criterion_2_slice_comparison(verdict):
    msgs = []
    for N in (4, 8, 16):
        inst, b = _bounds("case1", N)
        ig = oracle_gap(inst)
        B1, B2, B2p = b["ig.ellipsoid"], b["ig.slice.ellipsoid.case1.weak"], b["ig.slice.ellipsoid.case1"]
        ref = math.sqrt(1 / N ** 2 + 1)
        ok = (ig == 1 - Fraction(2, N) and abs(B2p - (1 - 2 / N)) <= 1e-12 and abs(B1 - ref) <= 1e-12
              and abs(B2 - ref) <= 1e-12 and B2p <= B1)
        if not ok:
            msgs.append(f"case1 N={N}: IG={ig} B2'={B2p} B1={B1} B2={B2}")
        inst, b = _bounds("case2", N)
        ig = float(oracle_gap(inst))
        B1, B2 = b["ig.ellipsoid"], b["ig.slice.ellipsoid.case2.weak"]
        B2p = b["ig.slice.ellipsoid.case2.ceil-relaxed"]
        ok = abs(ig - (1 - 1 / N ** 2)) <= TOL and ig <= B2p + TOL and B2p <= B1 + TOL and B1 <= B2 + TOL
        if not ok:
            msgs.append(f"case2 N={N}: IG={ig} B2'={B2p} B1={B1} B2={B2}")
    verdict(2, not msgs, "; ".join(msgs) or "Case 1 and Case 2 orderings hold for N in 4, 8, 16")


def test_criterion_3_weak_paraboloid_tightness(verdict):
    slack = []
    ok = True
    for N in range(1, 9):
        inst, b = _bounds("ex0", N)
        rep = next(r for r in all_bounds(inst.primary, inst.alpha) if r.formula == "ig.slice.paraboloid.weak")
        ok &= rep.value_exact == N + 1
        slack.append(rep.value_exact - oracle_gap(inst))
    ok &= all(a < b for a, b in zip(slack, slack[1:]))
    ok &= abs(float(slack[-1]) - 1.5) <= 0.1
    verdict(3, ok, f"bound minus IG: {[str(s) for s in slack]}")


@pytest.mark.parametrize("cls", list(FuzzClass))
def test_criterion_4_soundness_fuzz(verdict, cls):
    rng = np.random.default_rng(1234)
    t0 = time.perf_counter()
    violations, checked, moved = [], 0, 0
    for i in range(500):
        inst = random_instance(rng, cls, 2 + i % 2)
        ev = evaluate(f"{cls.value}-{i}", [inst.set], inst.alpha, primary=inst.set)
        checked += len(ev.bounds)
        violations += [(i, r.bound_id) for r in ev.violations]
        if cls is not FuzzClass.ELLIPSOID and i % 10 == 0:
            # the slice cap comes from the bounds themselves: a wider search must not move the optimum
            again = solve_ip_exact([inst.set], inst.alpha, inflate=5)
            moved += (again.value, again.optimizer) != (ev.ip.value, ev.ip.optimizer)
    elapsed = time.perf_counter() - t0
    verdict(4, not violations and not moved and elapsed < 300,
            f"{cls.value}: 500 instances, {checked} bounds, violations={violations[:5]}, "
            f"moved by +5 inflation={moved}, {elapsed:.1f} s")


def test_criterion_5_lattice(verdict):
    ok = all(covering_radius(MixedLattice(np.eye(n, dtype=int).tolist())).squared == Fraction(n, 4)
             for n in range(1, 9))
    mixed = covering_radius(MixedLattice([[1], [0]], [[1], [1]]))
    ok &= abs(mixed.value - 1 / (2 * math.sqrt(2))) <= 1e-12
    rng = np.random.default_rng(5)
    done, bad = 0, 0
    while done < 200:
        B = rng.integers(-5, 6, size=(2, 2))
        if round(abs(np.linalg.det(B))) == 0:
            continue
        cr = covering_radius(MixedLattice(B.tolist()))
        grid = covering_radius_grid_2d(B, resolution=100, span=2)
        upper = nearest_plane_bracket((B.T @ B).tolist()).upper
        bad += not (cr.exact and grid - 1e-3 <= cr.value <= upper + 1e-12)
        done += 1
    verdict(5, ok and not bad, f"Z^n exact for n=1..8, mixed example ok, {bad}/200 random bases out of bracket")


def test_criterion_6_geometry(verdict):
    rng = np.random.default_rng(6)
    unbounded = [FuzzClass.PARABOLOID, FuzzClass.HYPERBOLOID, FuzzClass.CONE]
    shift_bad = ell_bad = sep_bad = 0
    for i in range(100):
        inst = random_instance(rng, unbounded[i % 3], 2 + i % 2)
        x0 = inst.relaxation.optimizer
        r = float(rng.uniform(0.2, 3))
        theta, u = ball_shift(inst.set, x0, r)
        shift_bad += not ball_inside(inst.set, x0 + theta * u, r, rng)
    for i in range(100):
        inst = random_instance(rng, list(FuzzClass)[i % 4], 2 + i % 2)
        q = inst.set
        D = math.sqrt(max(q.lambda_1, 1e-3)) * float(rng.uniform(1, 2)) * np.eye(q.n)
        ell_bad += not ellipsoid_inside(q, inner_ellipsoid(q, inst.relaxation.optimizer, D), rng)
    for i in range(200):
        q, g = random_two_sheet(rng, 2 + i % 2)
        sep_bad += not branch_separates(q, g, rng)
    psi_err = 0.0
    done = 0
    while done < 50:
        A = rng.integers(-5, 6, size=(2, 2))
        M = A + A.T
        w, V = np.linalg.eigh(M.astype(float))
        if not (w[0] < -0.5 and w[1] > 0.5):
            continue
        q = QuadricSet(M.tolist(), [0, 0], 0, (V[:, 0].tolist(), 0))
        psi_err = max(psi_err, abs(psi_constant(q) - psi_grid_2d(M, V[:, 0])))
        done += 1
    ok = not (shift_bad or ell_bad or sep_bad) and psi_err <= 1e-3
    verdict(6, ok, f"ball_shift failures {shift_bad}/100, inner_ellipsoid failures {ell_bad}/100, "
                   f"branch separation failures {sep_bad}/200, max psi error {psi_err:.2e}")


def test_criterion_7_rhs_independence(verdict):
    rng = np.random.default_rng(7)
    worst, compared = 0.0, 0
    for i in range(100):
        inst = random_instance(rng, list(FuzzClass)[i % 4], 2 + i % 2)
        q = inst.set
        t = rng.integers(-4, 5, size=q.n)
        moved = q.translated(t)
        before = {r.formula: r.value for r in all_bounds(q, inst.alpha) if r.rhs_independent}
        after = {r.formula: r.value for r in all_bounds(moved, inst.alpha) if r.rhs_independent}
        assert before.keys() <= after.keys()
        for fid, v in before.items():
            worst = max(worst, abs(after[fid] - v) / max(1.0, abs(v)))
            compared += 1
    verdict(7, worst <= 1e-12 and compared > 0,
            f"{compared} rhs-independent bounds on 100 translated instances, worst relative change {worst:.1e}")
