"""JSON-over-HTTP service backing the interactive explorer.

In-memory session store of immutable datasets and built graphs; builds are
synchronous up to a configurable point cap. Errors are returned as
{code, message, detail} JSON bodies.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import coloring as coloring_mod
from . import cover as cover_mod
from . import models as models_mod
from . import tabledata
from .errors import BallMapperError, DataError, NumericError, ValidationError


@dataclass
class DatasetEntry:
    table: tabledata.DataTable
    n_bytes: int
    created: float


@dataclass
class GraphEntry:
    dataset_id: str
    cover: cover_mod.Cover
    graph: cover_mod.BallMapperGraph
    table: tabledata.DataTable  # preprocessed (winsorized) table of the build
    doc: dict  # exported graph JSON
    created: float


@dataclass
class SessionState:
    max_bytes: int = 64 * 1024 * 1024
    max_points: int = 50_000
    datasets: dict[str, DatasetEntry] = field(default_factory=dict)
    graphs: dict[str, GraphEntry] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _counter: itertools.count = field(default_factory=itertools.count)

    def total_bytes(self) -> int:
        return sum(e.n_bytes for e in self.datasets.values())

    def add_dataset(self, entry: DatasetEntry) -> str:
        with self._lock:
            if self.total_bytes() + entry.n_bytes > self.max_bytes:
                raise ValidationError("stored-bytes cap exceeded")
            ds_id = f"ds-{next(self._counter)}"
            self.datasets[ds_id] = entry
            return ds_id

    def add_graph(self, entry: GraphEntry) -> str:
        with self._lock:
            g_id = f"g-{next(self._counter)}"
            self.graphs[g_id] = entry
            return g_id


class BuildRequest(BaseModel):
    axes: list[str]
    epsilon: float
    strategy: str = "first"
    seed: int = 0
    winsor: dict | None = None  # {lower_q, upper_q, mode}
    colors: list[str] = []


class CompareRequest(BaseModel):
    group_a: list[int]
    group_b: list[int]
    variables: list[str]
    flag_threshold: float = 2.0


class RegressRequest(BaseModel):
    response: str
    regressors: list[str]
    graph_id: str | None = None


def _column_summary(table: tabledata.DataTable) -> list[dict]:
    out = []
    for name, values in table.columns.items():
        if name in table.text_column_names:
            out.append({"name": name, "numeric": False})
            continue
        clean = [v for v in values if v is not None]
        if not clean:
            out.append({"name": name, "numeric": True, "missing": len(values)})
            continue
        mean = sum(clean) / len(clean)
        sd = math.sqrt(sum((v - mean) ** 2 for v in clean) / len(clean))
        out.append({"name": name, "numeric": True,
                    "min": min(clean), "max": max(clean),
                    "mean": mean, "std": sd,
                    "missing": len(values) - len(clean)})
    return out


def create_app(max_points: int = 50_000,
               max_bytes: int = 64 * 1024 * 1024) -> FastAPI:
    app = FastAPI(title="ballmapper")
    state = SessionState(max_bytes=max_bytes, max_points=max_points)
    app.state.session = state

    def error(status: int, code: str, message: str, detail=None) -> JSONResponse:
        return JSONResponse(status_code=status, content={
            "code": code, "message": message, "detail": detail})

    @app.exception_handler(BallMapperError)
    async def _handle_engine_error(request: Request, exc: BallMapperError):
        if isinstance(exc, DataError):
            return error(400, "data_error", str(exc))
        if isinstance(exc, NumericError):
            return error(422, "numeric_error", str(exc))
        return error(422, "validation_error", str(exc))

    def get_dataset(ds_id: str) -> DatasetEntry:
        entry = state.datasets.get(ds_id)
        if entry is None:
            raise LookupError(ds_id)
        return entry

    def get_graph(g_id: str) -> GraphEntry:
        entry = state.graphs.get(g_id)
        if entry is None:
            raise LookupError(g_id)
        return entry

    @app.exception_handler(LookupError)
    async def _handle_missing(request: Request, exc: LookupError):
        return error(404, "not_found", f"unknown id {exc.args[0]!r}")

    @app.post("/datasets", status_code=201)
    async def post_dataset(request: Request, delimiter: str = ",",
                           group_column: str | None = None):
        body = await request.body()
        fmt = tabledata.FormatSpec(delimiter=delimiter)
        table = tabledata.load_table(body, fmt, group_column=group_column)
        ds_id = state.add_dataset(DatasetEntry(
            table=table, n_bytes=len(body), created=time.time()))
        return {"id": ds_id, "rows": table.n_rows,
                "columns": _column_summary(table)}

    @app.get("/datasets/{ds_id}")
    async def get_dataset_summary(ds_id: str):
        entry = get_dataset(ds_id)
        return {"id": ds_id, "rows": entry.table.n_rows,
                "columns": _column_summary(entry.table)}

    @app.post("/datasets/{ds_id}/graphs", status_code=201)
    async def post_build(ds_id: str, req: BuildRequest):
        entry = get_dataset(ds_id)
        table = entry.table
        for col in req.axes:
            table.numeric_column(col)
        if req.winsor:
            spec = tabledata.WinsorSpec(
                lower_q=req.winsor.get("lower_q", 0.005),
                upper_q=req.winsor.get("upper_q", 0.995),
                mode=req.winsor.get("mode", "clamp"))
            table = tabledata.winsorize(table, req.axes, spec)
        cloud, _ = tabledata.normalize_minmax(table, req.axes)
        if cloud.n > state.max_points:
            raise ValidationError(
                f"dataset has {cloud.n} points; synchronous cap is "
                f"{state.max_points}")
        params = cover_mod.CoverParams(epsilon=req.epsilon,
                                       strategy=req.strategy, seed=req.seed)
        cover, graph = cover_mod.build_ballmapper(cloud, params)
        colorings = {
            var: coloring_mod.induce_coloring(cover, table, var).vertex_values
            for var in req.colors}
        doc = cover_mod.graph_to_json(cover, graph, colorings or None)
        g_id = state.add_graph(GraphEntry(
            dataset_id=ds_id, cover=cover, graph=graph, table=table,
            doc=doc, created=time.time()))
        body = cover_mod.graph_json_dumps(doc)
        return {"id": g_id,
                "content_hash": hashlib.sha256(body.encode()).hexdigest(),
                "graph": doc}

    @app.get("/graphs/{g_id}")
    async def get_graph_doc(g_id: str):
        entry = get_graph(g_id)
        return {"id": g_id, "graph": entry.doc}

    @app.get("/graphs/{g_id}/colorings/{variable}")
    async def get_coloring(g_id: str, variable: str):
        entry = get_graph(g_id)
        result = coloring_mod.induce_coloring(entry.cover, entry.table, variable)
        return {"variable": variable, "values": result.vertex_values,
                "counts": result.counts}

    @app.post("/graphs/{g_id}/compare")
    async def post_compare(g_id: str, req: CompareRequest):
        entry = get_graph(g_id)
        report = coloring_mod.compare_balls(
            entry.cover, entry.table, req.group_a, req.group_b, req.variables)
        return {
            "group_a": report.group_a,
            "group_b": report.group_b,
            "rows": [{"variable": r.variable, "diff": r.diff, "dist": r.dist,
                      "sigma_zero": r.sigma_zero} for r in report.rows],
            "flags": report.flagged(req.flag_threshold),
        }

    @app.get("/graphs/{g_id}/summary")
    async def get_summary(g_id: str, variables: str | None = None):
        entry = get_graph(g_id)
        if variables:
            names = [v for v in variables.split(",") if v]
        else:
            names = [n for n in entry.table.columns
                     if n not in entry.table.text_column_names]
        rows = coloring_mod.ball_summary(entry.cover, entry.table, names)
        return {"variables": names,
                "rows": [{"ball_id": r.ball_id, "means": r.means, "obs": r.obs}
                         for r in rows]}

    @app.post("/datasets/{ds_id}/regress")
    async def post_regress(ds_id: str, req: RegressRequest):
        entry = get_dataset(ds_id)
        graph_entry = get_graph(req.graph_id) if req.graph_id else None
        table = graph_entry.table if graph_entry else entry.table
        fit = models_mod.ols_fit(table, req.regressors, req.response)
        out = {
            "names": fit.names,
            "coefficients": fit.coefficients.tolist(),
            "standard_errors": fit.standard_errors.tolist(),
            "t_abs": fit.t_abs.tolist(),
            "r_squared": fit.r_squared,
            "obs": len(fit.row_ids),
        }
        if graph_entry is not None:
            resid, abs_resid = models_mod.residual_coloring(
                fit, graph_entry.cover)
            out["residual_colorings"] = {
                "residuals": resid.vertex_values,
                "abs_residuals": abs_resid.vertex_values,
            }
        return out

    return app
