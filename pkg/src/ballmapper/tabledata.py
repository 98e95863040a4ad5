"""Tabular ingestion and preprocessing.

Loads delimited text into a DataTable, winsorizes selected columns,
min-max normalizes axis columns into a PointCloud on [0,1]^d, and
generates the synthetic "Y"-shaped test cloud.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NumericError, ValidationError

MISSING_TOKENS = {"", "NA"}


@dataclass
class FormatSpec:
    """How to read a delimited table."""

    delimiter: str = ","
    id_column: str = "id"
    text_columns: tuple[str, ...] = ()


@dataclass
class DataTable:
    """Labeled rows by named columns.

    Numeric columns hold float-or-None values; text columns (e.g. a month
    label used as the group column) hold strings. Immutable by convention:
    every operation returns a new table.
    """

    row_ids: list[str]
    columns: dict[str, list]
    group_column: str | None = None
    text_column_names: set[str] = field(default_factory=set)

    @property
    def n_rows(self) -> int:
        return len(self.row_ids)

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise ValidationError(f"column not found: {name!r}")
        return self.columns[name]

    def numeric_column(self, name: str) -> list:
        values = self.column(name)
        if name in self.text_column_names:
            raise ValidationError(f"column is not numeric: {name!r}")
        return values

    def row_index(self) -> dict[str, int]:
        return {rid: i for i, rid in enumerate(self.row_ids)}


@dataclass
class PointCloud:
    """Normalized coordinates plus the bookkeeping to undo the scaling."""

    coords: np.ndarray  # (n, d), each coordinate in [0, 1]
    axis_names: list[str]
    scaling: list[tuple[float, float]]  # per-axis (min, max)
    source_rows: list[str]  # point index -> row_id
    degenerate_axes: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]


@dataclass
class RetainedRowsReport:
    """Rows excluded while building the point cloud, with reasons."""

    dropped: list[tuple[str, str]] = field(default_factory=list)  # (row_id, reason)

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream)
        writer.writerow(["row_id", "reason"])
        writer.writerows(self.dropped)


@dataclass
class WinsorSpec:
    """Quantile clamp/drop specification.

    lower_q == 0 means no lower bound; upper_q == 1 clamps at the maximum
    (a no-op). Quantiles use the nearest-rank rule index = ceil(q * m) on
    the m non-missing sorted values.
    """

    lower_q: float = 0.005
    upper_q: float = 0.995
    mode: str = "clamp"  # "clamp" | "drop"
    per_group: bool = False

    def __post_init__(self):
        if not (0 <= self.lower_q < 0.5):
            raise ValidationError("lower_q must be in [0, 0.5)")
        if not (0.5 < self.upper_q <= 1):
            raise ValidationError("upper_q must be in (0.5, 1]")
        if self.lower_q >= self.upper_q:
            raise ValidationError("lower_q must be below upper_q")
        if self.mode not in ("clamp", "drop"):
            raise ValidationError(f"unknown winsor mode {self.mode!r}")


def _parse_cell(raw: str):
    raw = raw.strip()
    if raw in MISSING_TOKENS:
        return None
    return float(raw)


def load_table(source, fmt: FormatSpec | None = None,
               group_column: str | None = None) -> DataTable:
    """Parse delimited text (str, bytes, or a text stream) into a DataTable.

    Columns listed in fmt.text_columns, plus the group column, stay as
    strings; every other column must parse as numeric with empty / "NA"
    cells recorded as missing.
    """
    fmt = fmt or FormatSpec()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)

    reader = csv.reader(source, delimiter=fmt.delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("no header: input is empty")
    header = [h.strip() for h in header]
    if any(not h for h in header):
        raise DataError("malformed header on line 1: empty column name")
    seen = set()
    for name in header:
        if name in seen:
            raise DataError(f"duplicate column name: {name!r}")
        seen.add(name)

    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise DataError(
                f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        rows.append(row)

    text_names = set(fmt.text_columns)
    if group_column is not None:
        text_names.add(group_column)

    columns: dict[str, list] = {}
    for j, name in enumerate(header):
        if name == fmt.id_column:
            continue
        raw = [r[j] for r in rows]
        if name in text_names:
            columns[name] = [c.strip() for c in raw]
            continue
        parsed = []
        for i, cell in enumerate(raw):
            try:
                parsed.append(_parse_cell(cell))
            except ValueError:
                raise DataError(
                    f"non-numeric cell in column {name!r}, row {i + 1}: {cell!r}")
        columns[name] = parsed

    if not any(name not in text_names for name in columns):
        raise DataError("table has no numeric column")

    if fmt.id_column in header:
        j = header.index(fmt.id_column)
        row_ids = [r[j].strip() for r in rows]
    else:
        row_ids = [str(i + 1) for i in range(len(rows))]

    if group_column is not None and group_column not in columns:
        raise ValidationError(f"group column not found: {group_column!r}")

    return DataTable(row_ids=row_ids, columns=columns,
                     group_column=group_column,
                     text_column_names=text_names & set(columns))


def nearest_rank_bounds(values: list[float], lower_q: float,
                        upper_q: float) -> tuple[float | None, float | None]:
    """Nearest-rank quantile bounds over the non-missing values.

    Returns (lower, upper); lower is None when lower_q == 0.
    """
    clean = sorted(v for v in values if v is not None)
    m = len(clean)
    if m < 2:
        raise NumericError("quantile undefined: fewer than 2 non-missing values")
    lower = None
    if lower_q > 0:
        lower = clean[math.ceil(lower_q * m) - 1]
    upper = clean[math.ceil(upper_q * m) - 1]
    return lower, upper


def winsorize(table: DataTable, columns: list[str],
              spec: WinsorSpec) -> DataTable:
    """Clamp (or drop rows) outside the per-column quantile bounds.

    With spec.per_group, bounds are computed separately inside each level
    of the table's group column.
    """
    for name in columns:
        table.numeric_column(name)
    if spec.per_group:
        if table.group_column is None:
            raise ValidationError("per_group winsorization needs a group column")
        group_values = table.column(table.group_column)
        groups: dict = {}
        for i, g in enumerate(group_values):
            groups.setdefault(g, []).append(i)
        index_sets = list(groups.values())
    else:
        index_sets = [list(range(table.n_rows))]

    new_columns = {name: list(vals) for name, vals in table.columns.items()}
    drop = set()
    for idxs in index_sets:
        for name in columns:
            vals = [table.columns[name][i] for i in idxs]
            lower, upper = nearest_rank_bounds(vals, spec.lower_q, spec.upper_q)
            for i in idxs:
                v = table.columns[name][i]
                if v is None:
                    continue
                below = lower is not None and v < lower
                above = v > upper
                if spec.mode == "clamp":
                    if below:
                        new_columns[name][i] = lower
                    elif above:
                        new_columns[name][i] = upper
                elif below or above:
                    drop.add(i)

    if not drop:
        return DataTable(row_ids=list(table.row_ids), columns=new_columns,
                         group_column=table.group_column,
                         text_column_names=set(table.text_column_names))
    keep = [i for i in range(table.n_rows) if i not in drop]
    return DataTable(
        row_ids=[table.row_ids[i] for i in keep],
        columns={n: [v[i] for i in keep] for n, v in new_columns.items()},
        group_column=table.group_column,
        text_column_names=set(table.text_column_names))


def normalize_minmax(table: DataTable, axis_columns: list[str]
                     ) -> tuple[PointCloud, RetainedRowsReport]:
    """Min-max scale the axis columns to [0,1], excluding incomplete rows.

    A degenerate axis (min == max) maps to all zeros and is flagged rather
    than raised, so constant columns in pooled runs still proceed.
    """
    if not axis_columns:
        raise ValidationError("at least one axis column is required")
    cols = [table.numeric_column(name) for name in axis_columns]

    report = RetainedRowsReport()
    keep = []
    for i in range(table.n_rows):
        missing = [axis_columns[j] for j, c in enumerate(cols) if c[i] is None]
        if missing:
            report.dropped.append(
                (table.row_ids[i], f"missing axis value: {','.join(missing)}"))
        else:
            keep.append(i)
    if not keep:
        raise DataError("zero rows retained: every row misses an axis value")

    raw = np.array([[cols[j][i] for j in range(len(cols))] for i in keep],
                   dtype=float)
    scaling = []
    degenerate = []
    coords = np.empty_like(raw)
    for j, name in enumerate(axis_columns):
        lo, hi = float(raw[:, j].min()), float(raw[:, j].max())
        scaling.append((lo, hi))
        if hi == lo:
            coords[:, j] = 0.0
            degenerate.append(name)
        else:
            coords[:, j] = (raw[:, j] - lo) / (hi - lo)

    cloud = PointCloud(coords=coords, axis_names=list(axis_columns),
                       scaling=scaling,
                       source_rows=[table.row_ids[i] for i in keep],
                       degenerate_axes=degenerate)
    return cloud, report


def distance(a: int, b: int, cloud: PointCloud) -> float:
    """Euclidean distance between two points of the cloud."""
    return float(np.linalg.norm(cloud.coords[a] - cloud.coords[b]))


def generate_y_cloud(n: int, arm_length: float = 1.0, noise: float = 0.02,
                     seed: int = 0) -> DataTable:
    """Synthesize a "Y"-shaped 2-D table: a blob at the join plus three arms.

    Blob rows come first, then each arm in order with evenly spaced
    positions along its segment; noise jitters points off the segments.
    The `arm` column (0 = blob, 1..3) is kept for later coloring.
    Deterministic given the seed.
    """
    if n < 30:
        raise ValidationError("n must be at least 30 to express the Y shape")
    rng = np.random.default_rng(seed)
    per_arm = n // 5
    n_blob = n - 3 * per_arm

    blob = rng.normal(0.0, noise * arm_length, size=(n_blob, 2))
    xs, ys, arms = list(blob[:, 0]), list(blob[:, 1]), [0] * n_blob

    angles = np.deg2rad([90.0, 210.0, 330.0])
    for a, theta in enumerate(angles, start=1):
        t = np.linspace(arm_length / per_arm, arm_length, per_arm)
        jitter = rng.normal(0.0, noise * arm_length, size=(per_arm, 2))
        xs.extend(t * np.cos(theta) + jitter[:, 0])
        ys.extend(t * np.sin(theta) + jitter[:, 1])
        arms.extend([a] * per_arm)

    return DataTable(
        row_ids=[str(i + 1) for i in range(n)],
        columns={"x": [float(v) for v in xs],
                 "y": [float(v) for v in ys],
                 "arm": [float(a) for a in arms]})


# Reference radius at which the noiseless Y cloud yields 3 leaves.
DEFAULT_Y_EPSILON = 0.12
