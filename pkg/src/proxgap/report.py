"""Bound-versus-oracle rows shared by the CLI and the test suites."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .bounds import BoundKind, BoundReport, TwoSphereInstance, all_bounds
from .errors import BudgetExceeded, InfeasibleIntegerSet
from .oracle import IpSolution, IpStatus, proximity_exact, solve_ip_exact
from .quadric import Ellipsoid, QuadricSet, classify
from .relax import RelaxationResult, solve_relaxation

SOUND_RTOL = 1e-9

COLUMNS = ("name", "N", "class", "relax_value", "oracle_value", "oracle_ig", "bound_id", "bound_value",
           "rhs_independent", "sound")
SWEEP_COLUMNS = COLUMNS + ("closed_form_ig", "match")


@dataclass
class ReportRow:
    name: str
    N: int | None
    cls: str
    relax_value: Any = None
    oracle_value: Any = None
    oracle_ig: Any = None
    bound_id: str = ""
    bound_value: Any = None
    rhs_independent: bool | None = None
    sound: bool | None = None
    closed_form_ig: Any = None
    match: bool | None = None
    oracle_prox: float | None = None


@dataclass
class Evaluation:
    rows: list[ReportRow]
    relaxation: RelaxationResult | None
    ip: IpSolution | None
    bounds: list[BoundReport]

    @property
    def violations(self) -> list[ReportRow]:
        return [r for r in self.rows if r.sound is False]

    @property
    def mismatches(self) -> list[ReportRow]:
        return [r for r in self.rows if r.match is False]


def fmt(v: Any) -> str:
    """Deterministic text for a table cell."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _cell(row: ReportRow, col: str) -> Any:
    return getattr(row, "cls" if col == "class" else col)


def to_csv(rows: Sequence[ReportRow], columns: Sequence[str] = COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(_cell(r, c)) for c in columns])
    return buf.getvalue()


def to_markdown(rows: Sequence[ReportRow], columns: Sequence[str] = COLUMNS) -> str:
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for r in rows:
        lines.append("| " + " | ".join(fmt(_cell(r, c)) for c in columns) + " |")
    return "\n".join(lines) + "\n"


def sound_leq(lhs: Any, rhs: Any) -> bool:
    """lhs <= rhs, exactly for two rationals, else with a small relative slack."""
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        return lhs <= rhs
    a, b = float(lhs), float(rhs)
    return a <= b + SOUND_RTOL * (1 + abs(b))


def close(a: Any, b: Any, tol: float = 1e-9) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= tol


def class_name(S: Any) -> str:
    if isinstance(S, TwoSphereInstance):
        return "TwoSphere"
    if isinstance(S, Ellipsoid):
        S = S.as_quadric()
    if isinstance(S, QuadricSet):
        return classify(S).kind.value
    return "Intersection"


def _gap(value: Any, relax: Any) -> Any:
    if value is None or relax is None:
        return None
    if isinstance(value, Fraction) and isinstance(relax, Fraction):
        return value - relax
    return float(value) - float(relax)


def _relax_value(rel: RelaxationResult) -> Any:
    return rel.value_exact if rel.value_exact is not None else rel.value


def evaluate(name: str, sets: Sequence[Any], alpha: Sequence[Any], *, primary: Any = None, N: int | None = None,
             relax_value: Any = None, level_bounds: tuple[Any, Any] | None = None, with_oracle: bool = True,
             formula: str | None = None, budget: int | None = None, closed_form_ig: Any = None) -> Evaluation:
    """Bounds for ``primary`` (when given) next to the exact oracle over ``sets``.

    Raises BudgetExceeded when the enumeration budget runs out.
    """
    rel = None
    reports: list[BoundReport] = []
    if primary is not None:
        rel = solve_relaxation(primary, alpha)
        if relax_value is None and rel.value is not None:
            relax_value = _relax_value(rel)
        reports = all_bounds(primary, alpha, rel)
        if formula is not None:
            reports = [r for r in reports if r.formula == formula]
    cls = class_name(primary if primary is not None else (sets[0] if len(sets) == 1 else None))
    ip = None
    oracle_value = oracle_ig = None
    if with_oracle:
        ip = solve_ip_exact(list(sets), alpha, level_bounds=level_bounds, budget=budget)
        if ip.status is IpStatus.BOX_TRUNCATED:
            raise BudgetExceeded(ip.certificate)
        if ip.optimal:
            oracle_value = ip.value
            oracle_ig = _gap(ip.value, relax_value)
    rows: list[ReportRow] = []
    base = dict(name=name, N=N, cls=cls, relax_value=relax_value, oracle_value=oracle_value, oracle_ig=oracle_ig,
                closed_form_ig=closed_form_ig)
    if closed_form_ig is not None and with_oracle:
        base["match"] = oracle_ig is not None and close(oracle_ig, closed_form_ig)
    for rep in reports:
        row = ReportRow(**base, bound_id=rep.formula,
                        bound_value=rep.value_exact if rep.value_exact is not None else rep.value,
                        rhs_independent=rep.rhs_independent)
        if with_oracle:
            row.sound = _certify(rep, row, sets, rel, budget)
        rows.append(row)
    if not reports:
        rows.append(ReportRow(**base, sound=(None if not with_oracle else True)))
    return Evaluation(rows, rel, ip, reports)


def _certify(rep: BoundReport, row: ReportRow, sets: Sequence[Any], rel: RelaxationResult | None,
             budget: int | None) -> bool:
    bound = row.bound_value
    if rep.kind is BoundKind.INTEGRALITY_GAP:
        if row.oracle_ig is None:
            return False
        return sound_leq(row.oracle_ig, bound)
    if rel is None or rel.optimizer is None:
        return True
    xhat = rel.optimizer_exact if rel.optimizer_exact is not None else rel.optimizer
    try:
        prox = proximity_exact(list(sets), xhat, radius_cap=float(bound) + 1, budget=budget)
    except InfeasibleIntegerSet:
        return False
    row.oracle_prox = prox.distance
    return prox.distance <= float(bound) * (1 + SOUND_RTOL) + SOUND_RTOL
