import csv
import io
import json
import math
from pathlib import Path

import pytest
from click.testing import CliRunner

from proxgap.cli import main

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def run(*args, env=None):
    return CliRunner().invoke(main, [str(a) for a in args], env=env)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def write(tmp_path, obj, name="inst.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return p


class TestClassify:
    def test_disk(self):
        res = run("classify", INSTANCES / "disk.json")
        assert res.exit_code == 0 and res.output.strip() == "Ellipsoid q*=1"

    def test_parabola_family(self):
        assert run("classify", INSTANCES / "ex0_n1.json").output.strip() == "Paraboloid"

    def test_hyperbola(self):
        assert run("classify", INSTANCES / "hyperbola.json").output.startswith("TwoSheetHyperboloid")

    def test_intersection(self):
        out = run("classify", INSTANCES / "ex10_n1.json").output.splitlines()
        assert out == ["set[0]: Ellipsoid q*=4", "set[1]: Halfspace"]

    def test_malformed_json(self, tmp_path):
        res = run("classify", write(tmp_path, "{"))
        assert res.exit_code == 2 and "malformed JSON" in res.output

    @pytest.mark.parametrize("obj", [
        {"representation": "qr", "objective": [1, 0]},
        {"representation": "nope", "data": {}, "objective": [1, 0]},
        {"representation": "qr", "data": {"M": [[1, 0], [0, 1]], "beta": [0, 0], "gamma": -1}, "objective": [1]},
        {"representation": "qr", "data": {"M": [[1, 0], [0, 1]], "beta": [0, "x"], "gamma": -1},
         "objective": [1, 0]},
        {"representation": "qr", "data": {"M": [[1, 0], [0, 1]], "beta": [0, 0], "gamma": -1},
         "objective": [0.5, 0]},
    ])
    def test_schema_errors(self, tmp_path, obj):
        assert run("classify", write(tmp_path, obj)).exit_code == 2


class TestBound:
    def test_disk_prox_row(self):
        res = run("bound", INSTANCES / "disk.json")
        assert res.exit_code == 0
        got = {r["bound_id"]: r for r in rows(res.output)}
        assert float(got["prox.ellipsoid"]["bound_value"]) == pytest.approx(math.sqrt(2), rel=1e-11)
        assert got["prox.ellipsoid"]["oracle_value"] == ""

    def test_formula_filter(self):
        res = run("bound", INSTANCES / "case2_n4.json", "--formula", "ig.slice.ellipsoid.case2")
        (row,) = rows(res.output)
        assert float(row["bound_value"]) == pytest.approx(0.9375)

    def test_unknown_formula(self):
        assert run("bound", INSTANCES / "disk.json", "--formula", "ig.none").exit_code == 2

    def test_markdown(self):
        out = run("bound", INSTANCES / "disk.json", "--format", "md").output.splitlines()
        assert out[0].startswith("| name | N | class |") and out[1].startswith("|---|")

    def test_intersection_rejected(self):
        assert run("bound", INSTANCES / "ex10_n1.json").exit_code == 2


class TestVerify:
    def test_parabola_family(self):
        res = run("verify", INSTANCES / "ex0_n1.json")
        assert res.exit_code == 0
        got = {r["bound_id"]: r for r in rows(res.output)}
        assert got["ig.slice.paraboloid.weak"]["oracle_ig"] == "13/16"
        assert got["ig.slice.paraboloid.weak"]["bound_value"] == "2"
        assert all(r["sound"] == "true" for r in got.values())

    def test_intersection(self):
        (row,) = rows(run("verify", INSTANCES / "ex10_n1.json").output)
        assert float(row["oracle_ig"]) == pytest.approx(math.sqrt(1.75), abs=1e-9)

    def test_budget_exit(self, tmp_path):
        big = {"representation": "qr", "data": {"M": [[1, 0], [0, 1]], "beta": [0, 0], "gamma": -400},
               "objective": [1, 1]}
        res = run("verify", write(tmp_path, big), env={"PROX_ORACLE_BUDGET": "50"})
        assert res.exit_code == 3

    def test_violation_exit(self, tmp_path, monkeypatch):
        import proxgap.report as report
        monkeypatch.setattr(report, "sound_leq", lambda lhs, rhs: False)
        assert run("verify", INSTANCES / "case2_n4.json").exit_code == 1

    def test_byte_identical(self):
        a = run("verify", INSTANCES / "hyperbola.json").output
        b = run("verify", INSTANCES / "hyperbola.json").output
        assert a == b and a


class TestSweep:
    def test_ex7(self):
        res = run("sweep", "--family", "ex7", "--n-range", "1..8")
        assert res.exit_code == 0
        for r in rows(res.output):
            N = int(r["N"])
            assert r["bound_value"] == str(math.ceil(0.5 * math.sqrt(4 * N + 1) - 1e-9))
            assert r["match"] == "true"

    def test_ex0_exact(self):
        res = run("sweep", "--family", "ex0", "--n-range", "1..3")
        got = {(r["N"], r["bound_id"]): r for r in rows(res.output)}
        assert got[("2", "ig.slice.paraboloid.weak")]["closed_form_ig"] == "53/32"
        assert got[("2", "ig.slice.paraboloid.weak")]["oracle_ig"] == "53/32"

    def test_epsilon(self):
        res = run("sweep", "--family", "appendix:ex2", "--n-range", "2..2", "--epsilon", "1/4")
        (row,) = rows(res.output)
        assert row["closed_form_ig"] == "15/16" and row["match"] == "true"

    @pytest.mark.parametrize("rng", ["3", "0..2", "5..2", "a..b"])
    def test_bad_range(self, rng):
        assert run("sweep", "--family", "ex0", "--n-range", rng).exit_code == 2

    def test_case1_domain(self):
        assert run("sweep", "--family", "case1", "--n-range", "1..3").exit_code == 2
