"""Command-line pipeline: ingest, preprocess, cover, color, compare, model.

Every run writes a manifest with the full parameter set and content hashes
of its outputs, so identical configs reproduce byte-identical artifacts.
Exit codes: 0 ok, 2 validation error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import coloring as coloring_mod
from . import cover as cover_mod
from . import models as models_mod
from . import tabledata
from .errors import DataError, NumericError, ValidationError

EXIT_VALIDATION = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _fail(exc: Exception) -> "NoReturn":
    code = EXIT_VALIDATION
    if isinstance(exc, DataError):
        code = EXIT_DATA
    elif isinstance(exc, NumericError):
        code = EXIT_NUMERIC
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _load_table(path: str, delimiter: str, group_col: str | None) -> tabledata.DataTable:
    fmt = tabledata.FormatSpec(delimiter=delimiter)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return tabledata.load_table(fh, fmt, group_column=group_col)


def _split_csv_opt(value: str | None) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()] if value else []


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _format_cell(v) -> str:
    if v is None:
        return "NA"
    return f"{v:.10g}"


@click.group()
def main():
    """Ball Mapper engine: covers, graphs, colorings and comparisons."""


@main.command()
@click.option("--n", default=300, show_default=True)
@click.option("--arm-length", default=1.0, show_default=True)
@click.option("--noise", default=0.02, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def synth(n, arm_length, noise, seed, out):
    """Generate the synthetic Y-shaped two-column dataset."""
    try:
        table = tabledata.generate_y_cloud(n, arm_length, noise, seed)
    except (ValidationError, DataError, NumericError) as exc:
        _fail(exc)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + list(table.columns))
        for i, rid in enumerate(table.row_ids):
            writer.writerow([rid] + [_format_cell(table.columns[c][i])
                                     for c in table.columns])
    click.echo(f"wrote {table.n_rows} rows to {out}")


def run_pipeline(config: dict) -> dict:
    """Execute ingest -> winsorize -> normalize -> cover -> color -> export.

    Returns the manifest. Raises with the failing stage's name; partial
    outputs are removed on error.
    """
    out_dir = Path(config["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, data: str) -> None:
        path = out_dir / name
        path.write_text(data, encoding="utf-8")
        written.append(path)

    try:
        stage = "load"
        table = _load_table(config["input"], config["delimiter"],
                            config.get("group_col"))
        axes = config["axes"]
        for col in axes:
            table.numeric_column(col)

        stage = "winsorize"
        if config.get("winsor"):
            lq, uq = config["winsor"]
            spec = tabledata.WinsorSpec(lower_q=lq, upper_q=uq,
                                        mode=config.get("winsor_mode", "clamp"),
                                        per_group=config.get("winsor_per_group",
                                                             False))
            table = tabledata.winsorize(table, axes, spec)

        stage = "normalize"
        cloud, retained = tabledata.normalize_minmax(table, axes)

        stage = "cover"
        params = cover_mod.CoverParams(epsilon=config["epsilon"],
                                       strategy=config["strategy"],
                                       seed=config["seed"])
        cover, graph = cover_mod.build_ballmapper(cloud, params)

        stage = "color"
        colorings = {}
        for var in config.get("colors", []):
            c = coloring_mod.induce_coloring(cover, table, var)
            colorings[var] = c.vertex_values

        stage = "export"
        formats = config.get("formats", ["json", "dot", "csv"])
        if "json" in formats:
            emit("graph.json", cover_mod.graph_json_dumps(
                cover_mod.graph_to_json(cover, graph, colorings or None)))
        if "dot" in formats:
            emit("graph.dot", cover_mod.graph_to_dot(graph))
        if "csv" in formats:
            buf = io.StringIO()
            cover_mod.membership_to_csv(cover, buf)
            emit("membership.csv", buf.getvalue())
            summary = coloring_mod.ball_summary(
                cover, table, config.get("summary_vars", axes))
            buf = io.StringIO()
            writer = csv.writer(buf)
            names = config.get("summary_vars", axes)
            writer.writerow(["ball_id"] + names + ["obs"])
            for row in summary:
                writer.writerow([row.ball_id]
                                + [_format_cell(row.means[n]) for n in names]
                                + [row.obs])
            emit("ball_summary.csv", buf.getvalue())
        buf = io.StringIO()
        retained.write_csv(buf)
        emit("retained_rows.csv", buf.getvalue())

        manifest = {
            "config": {k: v for k, v in sorted(config.items())},
            "n_rows": table.n_rows,
            "n_points": cloud.n,
            "n_balls": cover.n_balls,
            "outputs": {p.name: _sha256(p.read_bytes()) for p in written},
        }
        emit("manifest.json", json.dumps(manifest, indent=2, sort_keys=True))
        return manifest
    except Exception as exc:
        for p in written:
            p.unlink(missing_ok=True)
        if isinstance(exc, (ValidationError, DataError, NumericError)):
            raise type(exc)(f"[{stage}] {exc}") from exc
        raise


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--axes", required=True, help="Comma-separated axis columns.")
@click.option("--color", "colors", default=None, help="Comma-separated coloring columns.")
@click.option("--epsilon", required=True, type=float)
@click.option("--strategy", type=click.Choice(["first", "random"]), default="first",
              show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--winsor", default=None, help="lower_q,upper_q (e.g. 0.005,0.995)")
@click.option("--winsor-mode", type=click.Choice(["clamp", "drop"]), default="clamp")
@click.option("--group-col", default=None)
@click.option("--delimiter", default=",")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--format", "formats", default="json,dot,csv", show_default=True)
def build(input_path, axes, colors, epsilon, strategy, seed, winsor,
          winsor_mode, group_col, delimiter, out, formats):
    """Run the full pipeline and write graph artifacts plus a manifest."""
    config = {
        "input": input_path,
        "axes": _split_csv_opt(axes),
        "colors": _split_csv_opt(colors),
        "epsilon": epsilon,
        "strategy": strategy,
        "seed": seed,
        "winsor": [float(x) for x in winsor.split(",")] if winsor else None,
        "winsor_mode": winsor_mode,
        "winsor_per_group": bool(group_col and winsor),
        "group_col": group_col,
        "delimiter": delimiter,
        "out": out,
        "formats": _split_csv_opt(formats),
    }
    try:
        manifest = run_pipeline(config)
    except (ValidationError, DataError, NumericError) as exc:
        _fail(exc)
    click.echo(f"built {manifest['n_balls']} balls over "
               f"{manifest['n_points']} points -> {out}")


def _load_cover(graph_path: str, input_path: str, delimiter: str,
                group_col: str | None):
    doc = json.loads(Path(graph_path).read_text(encoding="utf-8"))
    table = _load_table(input_path, delimiter, group_col)
    # Membership only needs row ids, so a placeholder 1-D cloud suffices;
    # point order follows the table order of the retained rows.
    row_index = table.row_index()
    member_rows = sorted({r for v in doc["vertices"] for r in v["members"]},
                         key=lambda r: row_index.get(r, 1 << 30))
    cloud = tabledata.PointCloud(
        coords=np.zeros((len(member_rows), 1)), axis_names=["_"],
        scaling=[(0.0, 1.0)], source_rows=member_rows)
    return cover_mod.cover_from_graph_json(doc, cloud), table


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--color", "variable", required=True)
@click.option("--delimiter", default=",")
def color(graph_path, input_path, variable, delimiter):
    """Print a coloring (per-ball means) for a stored graph artifact."""
    try:
        cover, table = _load_cover(graph_path, input_path, delimiter, None)
        result = coloring_mod.induce_coloring(cover, table, variable)
    except (ValidationError, DataError, NumericError) as exc:
        _fail(exc)
    click.echo(json.dumps({"variable": variable,
                           "values": result.vertex_values,
                           "counts": result.counts}, indent=2))


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--vars", "variables", required=True)
@click.option("--delimiter", default=",")
def summary(graph_path, input_path, variables, delimiter):
    """Print per-ball summary statistics (original units)."""
    names = _split_csv_opt(variables)
    try:
        cover, table = _load_cover(graph_path, input_path, delimiter, None)
        rows = coloring_mod.ball_summary(cover, table, names)
    except (ValidationError, DataError, NumericError) as exc:
        _fail(exc)
    writer = csv.writer(sys.stdout)
    writer.writerow(["ball_id"] + names + ["obs"])
    for row in rows:
        writer.writerow([row.ball_id] + [_format_cell(row.means[n]) for n in names]
                        + [row.obs])


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--group-a", required=True, help="Comma-separated ball ids.")
@click.option("--group-b", required=True, help="Comma-separated ball ids.")
@click.option("--vars", "variables", required=True)
@click.option("--delimiter", default=",")
@click.option("--flag-threshold", default=2.0, show_default=True)
def compare(graph_path, input_path, group_a, group_b, variables, delimiter,
            flag_threshold):
    """Diff / Dist comparison between two groups of balls."""
    names = _split_csv_opt(variables)
    try:
        ids_a = [int(x) for x in _split_csv_opt(group_a)]
        ids_b = [int(x) for x in _split_csv_opt(group_b)]
        cover, table = _load_cover(graph_path, input_path, delimiter, None)
        report = coloring_mod.compare_balls(cover, table, ids_a, ids_b, names)
    except ValueError as exc:
        _fail(ValidationError(str(exc)))
    except (ValidationError, DataError, NumericError) as exc:
        _fail(exc)
    flagged = set(report.flagged(flag_threshold))
    writer = csv.writer(sys.stdout)
    writer.writerow(["variable", "diff", "dist", "flag"])
    for row in report.rows:
        writer.writerow([row.variable, _format_cell(row.diff),
                         "NA" if row.dist is None else _format_cell(row.dist),
                         "*" if row.variable in flagged else ""])


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--response", required=True)
@click.option("--regressors", required=True, help="Comma-separated columns.")
@click.option("--delimiter", default=",")
def regress(input_path, response, regressors, delimiter):
    """OLS fit; prints a coefficient row, an |t| row and significance stars."""
    names = _split_csv_opt(regressors)
    try:
        table = _load_table(input_path, delimiter, None)
        fit = models_mod.ols_fit(table, names, response)
    except (ValidationError, DataError, NumericError) as exc:
        _fail(exc)
    writer = csv.writer(sys.stdout)
    writer.writerow(fit.names)
    writer.writerow([f"{c:.6g}{fit.stars(i)}"
                     for i, c in enumerate(fit.coefficients)])
    writer.writerow([f"({t:.4g})" for t in fit.t_abs])
    click.echo(f"r_squared,{fit.r_squared:.6g}")
    click.echo(f"obs,{len(fit.row_ids)}")


@main.command(name="kmeans")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--axes", required=True)
@click.option("--k", required=True, type=int)
@click.option("--seed", default=0, show_default=True)
@click.option("--max-iter", default=100, show_default=True)
@click.option("--epsilon", default=None, type=float,
              help="Also build the ball cover and report the size contrast.")
@click.option("--delimiter", default=",")
def kmeans_cmd(input_path, axes, k, seed, max_iter, epsilon, delimiter):
    """k-means clustering, optionally contrasted with a ball partition."""
    names = _split_csv_opt(axes)
    try:
        table = _load_table(input_path, delimiter, None)
        cloud, _ = tabledata.normalize_minmax(table, names)
        clusterings = [models_mod.kmeans(cloud, k, seed, max_iter)]
        if epsilon is not None:
            cover, _ = cover_mod.build_ballmapper(
                cloud, cover_mod.CoverParams(epsilon=epsilon))
            partition = coloring_mod.assign_unique(cover)
            if cover.n_balls != k and cover.n_balls <= cloud.n:
                clusterings.append(
                    models_mod.kmeans(cloud, cover.n_balls, seed, max_iter))
            rows = models_mod.cluster_size_report(partition, clusterings)
        else:
            rows = [models_mod.ClusterSizeReport(
                method=f"k-means (k={k})",
                groups=len([s for s in clusterings[0].sizes() if s]),
                min_size=min(s for s in clusterings[0].sizes() if s),
                max_size=max(clusterings[0].sizes()))]
    except (ValidationError, DataError, NumericError) as exc:
        _fail(exc)
    writer = csv.writer(sys.stdout)
    writer.writerow(["method", "groups", "min", "max"])
    for row in rows:
        writer.writerow([row.method, row.groups, row.min_size, row.max_size])


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["dot", "csv"]), required=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def export(graph_path, fmt, out):
    """Convert a stored graph JSON artifact to DOT or membership CSV."""
    doc = json.loads(Path(graph_path).read_text(encoding="utf-8"))
    if fmt == "dot":
        graph = cover_mod.BallMapperGraph(
            vertex_weights=[v["weight"]
                            for v in sorted(doc["vertices"], key=lambda v: v["id"])],
            edges=[(e["source"], e["target"], e["weight"])
                   for e in doc["edges"]])
        Path(out).write_text(cover_mod.graph_to_dot(graph), encoding="utf-8")
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row_id", "ball_id"])
            for v in sorted(doc["vertices"], key=lambda v: v["id"]):
                for rid in v["members"]:
                    writer.writerow([rid, v["id"]])
    click.echo(f"wrote {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8265, show_default=True)
def serve(host, port):
    """Run the HTTP service for the interactive explorer."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
