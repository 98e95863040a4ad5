"""Vertex colorings, per-ball summaries, group comparisons, unique assignment.

Colorings average a per-point variable over each ball's members; summaries
and comparisons always report in the variable's original units, never
normalized coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cover import Cover
from .errors import DataError, ValidationError
from .tabledata import DataTable


@dataclass
class Coloring:
    variable_name: str
    vertex_values: list[float | None]  # None when no member has the variable
    counts: list[int]


@dataclass
class BallSummaryRow:
    ball_id: int
    means: dict[str, float | None]
    obs: int


@dataclass
class ComparisonRow:
    variable: str
    diff: float
    dist: float | None  # None when the whole-sample sigma is zero
    sigma_zero: bool = False


@dataclass
class ComparisonReport:
    group_a: list[int]
    group_b: list[int]
    rows: list[ComparisonRow] = field(default_factory=list)

    def flagged(self, threshold: float = 2.0) -> list[str]:
        """Variables whose |dist| reaches the threshold."""
        return [r.variable for r in self.rows
                if r.dist is not None and abs(r.dist) >= threshold]


def _point_values(cover: Cover, table: DataTable, variable: str) -> list:
    """Variable value per cloud point, aligned to point indices."""
    values = table.numeric_column(variable)
    index = table.row_index()
    out = []
    for rid in cover.cloud.source_rows:
        if rid not in index:
            raise DataError(f"cloud row {rid!r} not present in the table")
        out.append(values[index[rid]])
    return out


def _mean(vals: list[float]) -> float | None:
    return sum(vals) / len(vals) if vals else None


def induce_coloring(cover: Cover, table: DataTable, variable: str) -> Coloring:
    """Per-ball mean of the variable; balls with no contributors are flagged."""
    per_point = _point_values(cover, table, variable)
    vertex_values = []
    counts = []
    for mem in cover.members:
        present = [per_point[p] for p in mem if per_point[p] is not None]
        vertex_values.append(_mean(present))
        counts.append(len(present))
    return Coloring(variable_name=variable, vertex_values=vertex_values,
                    counts=counts)


def coloring_from_values(cover: Cover, name: str,
                         per_point: list[float]) -> Coloring:
    """Coloring from already-aligned per-point values (e.g. residuals)."""
    if len(per_point) != cover.cloud.n:
        raise ValidationError("per-point values do not align with the cloud")
    vertex_values = []
    counts = []
    for mem in cover.members:
        vals = [per_point[p] for p in mem if per_point[p] is not None]
        vertex_values.append(_mean(vals))
        counts.append(len(vals))
    return Coloring(variable_name=name, vertex_values=vertex_values,
                    counts=counts)


def ball_summary(cover: Cover, table: DataTable,
                 variables: list[str]) -> list[BallSummaryRow]:
    """One row per ball; obs counts raw membership, overlaps included."""
    per_var = {v: _point_values(cover, table, v) for v in variables}
    rows = []
    for ball_id, mem in enumerate(cover.members, start=1):
        means = {}
        for v in variables:
            vals = [per_var[v][p] for p in mem if per_var[v][p] is not None]
            means[v] = _mean(vals)
        rows.append(BallSummaryRow(ball_id=ball_id, means=means, obs=len(mem)))
    return rows


def _population_sd(vals: list[float]) -> float:
    mean = sum(vals) / len(vals)
    return math.sqrt(sum((v - mean) ** 2 for v in vals) / len(vals))


def compare_balls(cover: Cover, table: DataTable, group_a: list[int],
                  group_b: list[int],
                  variables: list[str]) -> ComparisonReport:
    """Diff of pooled-group means, and Diff scaled by the whole-run sigma.

    Each group's member set is the deduplicated union of its balls' members;
    sigma is the population standard deviation over all retained rows.
    """
    if not group_a or not group_b:
        raise ValidationError("comparison groups must be non-empty")

    def pooled(ball_ids):
        pts = set()
        for b in ball_ids:
            pts.update(cover.members_of(b))
        if not pts:
            raise DataError("empty pooled member set")
        return sorted(pts)

    points_a, points_b = pooled(group_a), pooled(group_b)
    report = ComparisonReport(group_a=list(group_a), group_b=list(group_b))
    for v in variables:
        per_point = _point_values(cover, table, v)
        vals_a = [per_point[p] for p in points_a if per_point[p] is not None]
        vals_b = [per_point[p] for p in points_b if per_point[p] is not None]
        if not vals_a or not vals_b:
            raise DataError(f"no non-missing values of {v!r} in a group")
        whole = [x for x in per_point if x is not None]
        diff = _mean(vals_a) - _mean(vals_b)
        sigma = _population_sd(whole)
        if sigma == 0:
            report.rows.append(ComparisonRow(variable=v, diff=diff, dist=None,
                                             sigma_zero=True))
        else:
            report.rows.append(ComparisonRow(variable=v, diff=diff,
                                             dist=diff / sigma))
    return report


def assign_unique(cover: Cover) -> dict[int, list[int]]:
    """Hard partition: each point goes to the lowest ball id containing it.

    Balls that are nobody's lowest container receive no points and are
    absent from the result.
    """
    owner: dict[int, int] = {}
    for ball_id, mem in enumerate(cover.members, start=1):
        for p in mem:
            if p not in owner:
                owner[p] = ball_id
    partition: dict[int, list[int]] = {}
    for p in sorted(owner):
        partition.setdefault(owner[p], []).append(p)
    return partition
