"""Command-line front end: ``prox classify|bound|verify|sweep``.

Exit codes: 0 success, 1 soundness violation or closed-form mismatch,
2 input error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import click

from . import _rational as R
from .bounds import TwoSphereInstance
from .errors import BudgetExceeded, CannotCertifyBox, ProxGapError
from .families import FAMILIES, build
from .oracle import Halfspace
from .quadric import Ellipsoid, QuadricSet, SocrSet, classify, socr_to_qr
from .report import COLUMNS, SWEEP_COLUMNS, ReportRow, evaluate, fmt, to_csv, to_markdown

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

REPRESENTATIONS = ("socr", "qr", "er", "two_sphere", "intersection")


class InputError(Exception):
    pass


@dataclass
class Instance:
    name: str
    representation: str
    sets: list
    objective: tuple
    parameters: dict = field(default_factory=dict)
    primary: Any = None

    @property
    def n(self) -> int:
        return len(self.objective)


def _need(data: dict, *keys: str) -> list:
    missing = [k for k in keys if k not in data]
    if missing:
        raise InputError(f"missing field(s): {', '.join(missing)}")
    return [data[k] for k in keys]


def _check_numbers(v: Any) -> None:
    if isinstance(v, list):
        for x in v:
            _check_numbers(x)
        return
    try:
        R.parse_scalar(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a number: {v!r}") from exc


def _parse_set(rep: str, data: dict, objective: tuple) -> Any:
    if not isinstance(data, dict):
        raise InputError("data must be an object")
    if rep == "socr":
        A, b, c, d = _need(data, "A", "b", "c", "d")
        _check_numbers([A, b, c, d])
        return socr_to_qr(SocrSet(A, b, c, d))
    if rep == "qr":
        M, beta, gamma = _need(data, "M", "beta", "gamma")
        _check_numbers([M, beta, gamma])
        branch = data.get("branch")
        if branch is not None:
            g, h = _need(branch, "g", "h")
            _check_numbers([g, h])
            branch = (g, h)
        return QuadricSet(M, beta, gamma, branch)
    if rep == "er":
        Q, p, r = _need(data, "Q", "p", "r")
        _check_numbers([Q, p, r])
        return Ellipsoid(Q, p, r)
    if rep == "two_sphere":
        r1, r2, p, n = _need(data, "r1", "r2", "p", "n")
        _check_numbers([r1, r2, p, n])
        return TwoSphereInstance(float(R.parse_scalar(r1)), float(R.parse_scalar(r2)), float(R.parse_scalar(p)),
                                 int(n), tuple(objective))
    if rep == "halfspace":
        g, h = _need(data, "g", "h")
        _check_numbers([g, h])
        return Halfspace(tuple(g), R.parse_scalar(h))
    raise InputError(f"unknown representation {rep!r}")


def parse_instance(obj: Any) -> Instance:
    """Build an Instance from decoded JSON; raises InputError on schema problems."""
    if not isinstance(obj, dict):
        raise InputError("instance must be a JSON object")
    name = str(obj.get("name", "instance"))
    rep, data, objective = _need(obj, "representation", "data", "objective")
    if rep not in REPRESENTATIONS:
        raise InputError(f"representation must be one of {', '.join(REPRESENTATIONS)}")
    if not isinstance(objective, list) or not objective:
        raise InputError("objective must be a nonempty list")
    _check_numbers(objective)
    obj_vec = tuple(R.parse_scalar(a) for a in objective)
    if any(isinstance(a, Fraction) and a.denominator != 1 or isinstance(a, float) and a != int(a) for a in obj_vec):
        raise InputError("objective must be an integer vector")
    obj_vec = tuple(int(a) for a in obj_vec)
    params = obj.get("parameters") or {}
    try:
        if rep == "intersection":
            members = data.get("sets", []) if isinstance(data, dict) else None
            if not isinstance(members, list):
                raise InputError("intersection data needs a 'sets' list")
            sets = [_parse_set(m.get("representation", ""), m.get("data"), obj_vec) for m in members]
            sets += [_parse_set("halfspace", h, obj_vec) for h in data.get("halfspaces", [])]
            if not sets:
                raise InputError("empty intersection")
            primary = None
        else:
            primary = _parse_set(rep, data, obj_vec)
            sets = [primary]
    except InputError:
        raise
    except (ProxGapError, ValueError, TypeError, IndexError, KeyError, AttributeError) as exc:
        raise InputError(f"invalid {rep} data: {exc}") from exc
    inst = Instance(name, rep, sets, obj_vec, params, primary)
    for s in sets:
        dim = s.n if hasattr(s, "n") else len(s.g)
        if dim != inst.n:
            raise InputError(f"objective has length {inst.n} but a set lives in dimension {dim}")
    return inst


def load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    return parse_instance(obj)


def describe(S: Any) -> str:
    if isinstance(S, TwoSphereInstance):
        return f"TwoSphere kappa={fmt(S.kappa)}"
    if isinstance(S, Halfspace):
        return "Halfspace"
    if isinstance(S, Ellipsoid):
        S = S.as_quadric()
    return str(classify(S))


def _level_bounds(inst: Instance):
    lo = inst.parameters.get("relax_value")
    hi = inst.parameters.get("objective_upper")
    if lo is None and hi is None:
        return None
    return (None if lo is None else R.parse_scalar(lo), None if hi is None else R.parse_scalar(hi))


def _emit(rows: list[ReportRow], fmt_name: str, columns=COLUMNS) -> None:
    text = to_csv(rows, columns) if fmt_name == "csv" else to_markdown(rows, columns)
    click.echo(text, nl=False)


def _fail(msg: str, code: int) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _run(fn):
    """Map library errors onto the exit-code contract."""
    try:
        return fn()
    except InputError as exc:
        _fail(str(exc), EXIT_INPUT)
    except BudgetExceeded as exc:
        _fail(f"oracle budget exceeded: {exc}", EXIT_BUDGET)
    except CannotCertifyBox as exc:
        _fail(f"cannot certify an enumeration box: {exc}", EXIT_INPUT)
    except ProxGapError as exc:
        _fail(f"{type(exc).__name__}: {exc}", EXIT_INPUT)


FORMAT = click.option("--format", "fmt_name", type=click.Choice(["csv", "md"]), default="csv", show_default=True)


@click.group()
def main() -> None:
    """Proximity and integrality-gap bounds for integer points in quadric sets."""


@main.command("classify")
@click.argument("file", type=click.Path(dir_okay=False))
def classify_cmd(file: str) -> None:
    """Print the class of each set in FILE."""
    def go():
        inst = load_instance(file)
        if len(inst.sets) == 1:
            click.echo(describe(inst.sets[0]))
        else:
            for i, s in enumerate(inst.sets):
                click.echo(f"set[{i}]: {describe(s)}")
    _run(go)


@main.command("bound")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--all", "all_", is_flag=True, default=False, help="Every applicable bound (the default).")
@click.option("--formula", default=None, help="Only the bound with this id, e.g. ig.slice.ellipsoid.case1.")
@FORMAT
def bound_cmd(file: str, all_: bool, formula: str | None, fmt_name: str) -> None:
    """Tabulate the bounds that apply to FILE without running the oracle."""
    if all_ and formula:
        _fail("--all and --formula are exclusive", EXIT_INPUT)

    def go():
        inst = load_instance(file)
        if inst.primary is None:
            raise InputError("bounds are defined for a single set; use verify for intersections")
        ev = evaluate(inst.name, inst.sets, inst.objective, primary=inst.primary, N=inst.parameters.get("N"),
                      with_oracle=False, formula=formula)
        if formula and not ev.bounds:
            raise InputError(f"formula {formula!r} does not apply to this instance")
        _emit(ev.rows, fmt_name)
    _run(go)


@main.command("verify")
@click.argument("file", type=click.Path(dir_okay=False))
@FORMAT
def verify_cmd(file: str, fmt_name: str) -> None:
    """Compare every bound for FILE with the exact enumeration oracle."""
    def go():
        inst = load_instance(file)
        relax = inst.parameters.get("relax_value")
        ev = evaluate(inst.name, inst.sets, inst.objective, primary=inst.primary, N=inst.parameters.get("N"),
                      relax_value=None if relax is None else R.parse_scalar(relax), level_bounds=_level_bounds(inst))
        _emit(ev.rows, fmt_name)
        return ev
    ev = _run(go)
    if ev.violations:
        _fail(f"{len(ev.violations)} bound(s) below the oracle value", EXIT_VIOLATION)


def parse_range(text: str) -> range:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError as exc:
        raise click.BadParameter("expected a..b with integers a <= b") from exc
    if lo > hi or lo < 1:
        raise click.BadParameter("expected 1 <= a <= b")
    return range(lo, hi + 1)


@main.command("sweep")
@click.option("--family", required=True, type=click.Choice(sorted(FAMILIES)))
@click.option("--n-range", "n_range", required=True, help="Inclusive range a..b.")
@click.option("--epsilon", default=None, help="Offset for appendix:ex2, as a float or p/q (default 1/2).")
@FORMAT
def sweep_cmd(family: str, n_range: str, epsilon: str | None, fmt_name: str) -> None:
    """Oracle value against the closed-form integrality gap of a built-in family."""
    Ns = parse_range(n_range)
    eps = None
    if epsilon is not None:
        try:
            eps = R.parse_scalar(epsilon)
        except (TypeError, ValueError, ZeroDivisionError):
            _fail(f"bad --epsilon {epsilon!r}", EXIT_INPUT)

    def go():
        rows: list[ReportRow] = []
        for N in Ns:
            try:
                inst = build(family, N, epsilon=eps)
            except ValueError as exc:
                raise InputError(str(exc)) from exc
            ev = evaluate(inst.name, inst.sets, inst.alpha, primary=inst.primary, N=N, relax_value=inst.relax_value,
                          level_bounds=inst.level_bounds, closed_form_ig=inst.closed_form_ig)
            rows += ev.rows
        return rows
    rows = _run(go)
    _emit(rows, fmt_name, SWEEP_COLUMNS)
    bad = [r for r in rows if r.sound is False or r.match is False]
    if bad:
        _fail(f"{len(bad)} row(s) with a violation or closed-form mismatch", EXIT_VIOLATION)


if __name__ == "__main__":  # pragma: no cover
    main()
