"""Acceptance gate: one test per criterion, printing a pass line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines on the terminal.
"""

import json
import socket
import threading
import time

import httpx
import numpy as np
import pytest
import uvicorn
from click.testing import CliRunner

import ballmapper as bm
from ballmapper.cli import main as cli_main
from ballmapper.coloring import assign_unique, compare_balls
from ballmapper.cover import CoverParams, build_ballmapper, build_cover
from ballmapper.models import kmeans, ols_fit
from ballmapper.service import create_app
from ballmapper.tabledata import (DEFAULT_Y_EPSILON, DataTable,
                                  generate_y_cloud, normalize_minmax)

from conftest import make_cloud, make_1d_cloud


def ok(name):
    print(f"ACCEPT {name}: PASS")


# ---------------------------------------------------------------- corpus

N_CORPUS = 200


@pytest.fixture(scope="module")
def corpus():
    """200 random clouds with sampled epsilon, plus their built covers."""
    rng = np.random.default_rng(20180601)
    instances = []
    for _ in range(N_CORPUS):
        n = int(rng.integers(20, 501))
        d = int(rng.integers(2, 9))
        coords = rng.random((n, d))
        eps = float(np.sqrt(d) * rng.uniform(0.12, 0.5))
        cloud = make_cloud(coords)
        cover, graph = build_ballmapper(cloud, CoverParams(epsilon=eps))
        instances.append((cloud, eps, cover, graph))
    return instances


def test_cover_completeness_oracle(corpus):
    start = time.time()
    for cloud, eps, cover, _ in corpus:
        lm = cloud.coords[cover.landmarks]
        dists = np.linalg.norm(cloud.coords[:, None, :] - lm[None, :, :],
                               axis=2)
        assert (dists.min(axis=1) <= eps).all()
        for ball, mem in enumerate(cover.members):
            assert (dists[mem, ball] <= eps).all()
    assert time.time() - start < 30
    ok("cover completeness oracle (200 clouds, 0 violations)")


def test_edge_iff_intersection_oracle(corpus):
    for cloud, _, cover, graph in corpus:
        m = cover.n_balls
        member_matrix = np.zeros((m, cloud.n), dtype=bool)
        for ball, mem in enumerate(cover.members):
            member_matrix[ball, mem] = True
        overlap = member_matrix.astype(int) @ member_matrix.T.astype(int)
        expected = [(i + 1, j + 1, int(overlap[i, j]))
                    for i in range(m) for j in range(i + 1, m)
                    if overlap[i, j] > 0]
        assert graph.edges == expected
    ok("edge-iff-intersection oracle (weights exact)")


def test_two_epsilon_diameter_bound(corpus):
    for cloud, eps, cover, _ in corpus:
        for mem in cover.members:
            pts = cloud.coords[mem]
            if len(mem) < 2:
                continue
            diff = pts[:, None, :] - pts[None, :, :]
            worst = np.sqrt((diff ** 2).sum(axis=2)).max()
            assert worst <= 2 * eps + 1e-12
    ok("2-epsilon intra-ball diameter bound")


def test_resolution_contract_on_corpus(corpus):
    rng = np.random.default_rng(7)
    for cloud, _, _, _ in corpus[:40]:  # diameter/min-gap need all-pairs
        d2 = ((cloud.coords[:, None, :] - cloud.coords[None, :, :]) ** 2
              ).sum(axis=2)
        dist = np.sqrt(d2)
        diam = dist.max()
        np.fill_diagonal(dist, np.inf)
        min_gap = dist.min()
        big, gb = build_ballmapper(cloud, CoverParams(epsilon=diam * 1.001))
        assert big.n_balls == 1 and gb.edges == []
        if min_gap > 0:
            small, gs = build_ballmapper(
                cloud, CoverParams(epsilon=min_gap * 0.999))
            assert small.n_balls == cloud.n and gs.edges == []
    # bundled fixture: finer radius yields strictly more balls
    table = generate_y_cloud(300, noise=0.0, seed=1)
    cloud, _ = normalize_minmax(table, ["x", "y"])
    fine, _ = build_ballmapper(cloud, CoverParams(epsilon=0.1))
    coarse, _ = build_ballmapper(cloud, CoverParams(epsilon=0.4))
    assert fine.n_balls > coarse.n_balls
    ok("resolution contract (diameter, min-gap, 0.1 vs 0.4)")


# --------------------------------------------- published-table arithmetic

def test_comparison_arithmetic_cross_check():
    # two singleton balls whose group means are -57.17 and 8.621
    cloud = make_1d_cloud([0.0, 1.0])
    cover = build_cover(cloud, [0, 1], 0.1)
    table = DataTable(row_ids=["1", "2"],
                      columns={"cash": [-57.17, 8.621]})
    report = compare_balls(cover, table, [1], [2], ["cash"])
    diff = report.rows[0].diff
    assert diff == pytest.approx(-65.791, abs=1e-12)
    assert round(diff, 2) == -65.79

    # mean difference 0.262 under whole-sample sigma 0.636
    target_diff, target_sigma = 0.262, 0.636
    half = target_diff / 2
    spread = np.sqrt(target_sigma ** 2 - half ** 2)
    values = [half + spread, half - spread, -half + spread, -half - spread]
    cloud = make_1d_cloud([0.0, 0.01, 1.0, 1.01])
    cover = build_cover(cloud, [0, 2], 0.05)
    table = DataTable(row_ids=["1", "2", "3", "4"], columns={"bm": values})
    report = compare_balls(cover, table, [1], [2], ["bm"])
    assert report.rows[0].diff == pytest.approx(target_diff, abs=1e-12)
    dist = report.rows[0].dist
    assert abs(dist) == pytest.approx(0.412, abs=5e-4)
    assert abs(abs(dist) - 0.413) < 0.002  # printed value, rounding slack
    ok("comparison arithmetic cross-check (diff -65.79, |dist| 0.412)")


# ------------------------------------------------------------- Y topology

def test_y_cloud_topology():
    start = time.time()
    table = generate_y_cloud(300, noise=0.0, seed=1)
    cloud, _ = normalize_minmax(table, ["x", "y"])
    cover, graph = build_ballmapper(
        cloud, CoverParams(epsilon=DEFAULT_Y_EPSILON, strategy="first"))
    assert graph.is_connected()
    assert sum(1 for d in graph.degrees() if d == 1) == 3
    # deterministic: identical rebuild
    cover2, graph2 = build_ballmapper(
        cloud, CoverParams(epsilon=DEFAULT_Y_EPSILON, strategy="first"))
    assert cover2.members == cover.members and graph2.edges == graph.edges
    assert time.time() - start < 1
    ok("Y-cloud topology (connected, exactly 3 leaves)")


# ------------------------------------------------------------------- OLS

def test_ols_oracle_100_instances():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n, p = 200, 7
        X = rng.normal(size=(n, p))
        y = rng.normal() + X @ rng.normal(size=p) + rng.normal(scale=0.7,
                                                               size=n)
        cols = {f"x{j}": X[:, j].tolist() for j in range(p)}
        cols["y"] = y.tolist()
        table = DataTable(row_ids=[str(i) for i in range(n)], columns=cols)
        fit = ols_fit(table, [f"x{j}" for j in range(p)], "y")

        Xd = np.column_stack([np.ones(n), X])
        xtx_inv = np.linalg.inv(Xd.T @ Xd)
        beta = xtx_inv @ Xd.T @ y
        resid = y - Xd @ beta
        s2 = float(resid @ resid) / (n - p - 1)
        se = np.sqrt(np.diag(s2 * xtx_inv))
        r2 = 1 - float(resid @ resid) / float(((y - y.mean()) ** 2).sum())

        assert np.abs(fit.coefficients - beta).max() < 1e-10
        assert np.abs(fit.standard_errors - se).max() < 1e-8
        assert abs(fit.r_squared - r2) < 1e-10
        assert abs(fit.residuals.sum()) < 1e-8
    ok("OLS oracle (100 instances: coef 1e-10, SE 1e-8, R2 1e-10)")


# ---------------------------------------------------------------- k-means

def test_kmeans_criteria():
    rng = np.random.default_rng(5)
    for _ in range(100):
        cloud = make_cloud(rng.random((int(rng.integers(10, 80)), 3)))
        k = int(rng.integers(1, min(8, cloud.n) + 1))
        result = kmeans(cloud, k, seed=int(rng.integers(1 << 30)))
        hist = result.objective_history
        assert all(hist[i + 1] <= hist[i] + 1e-9
                   for i in range(len(hist) - 1))
    cloud = make_cloud(rng.random((50, 4)))
    r1 = kmeans(cloud, 1, seed=0)
    assert np.abs(r1.centroids[0] - cloud.coords.mean(axis=0)).max() < 1e-12

    a = rng.normal(0.0, 0.05, size=(40, 2))
    b = rng.normal(3.0, 0.05, size=(40, 2))
    result = kmeans(make_cloud(np.vstack([a, b])), 2, seed=1)
    labels = result.assignments
    assert len(set(labels[:40])) == 1 and len(set(labels[40:])) == 1
    assert labels[0] != labels[40]
    ok("k-means (monotone objective, k=1 mean, two-blob recovery)")


def _contrast_fixture(seed):
    rng = np.random.default_rng(seed)
    centers = np.array([[0, 0], [4, 0], [0, 4], [4, 4], [2, 2]], dtype=float)
    core = np.vstack([rng.normal(c, 0.7, size=(250, 2)) for c in centers])
    outliers = np.array([[8, 2], [-4, 2], [2, 8], [2, -4]], dtype=float) \
        + rng.normal(0, 0.05, size=(4, 2))
    pts = np.vstack([core, outliers])
    table = DataTable(row_ids=[str(i) for i in range(len(pts))],
                      columns={"a": pts[:, 0].tolist(),
                               "b": pts[:, 1].tolist()})
    cloud, _ = normalize_minmax(table, ["a", "b"])
    return cloud


def test_clustering_contrast_property():
    hits = 0
    for seed in range(5):
        cloud = _contrast_fixture(seed)
        cover, _ = build_ballmapper(cloud, CoverParams(epsilon=0.1))
        sizes = [len(v) for v in assign_unique(cover).values()]
        km = kmeans(cloud, cover.n_balls, seed=seed)
        km_sizes = [s for s in km.sizes() if s > 0]
        if min(sizes) == 1 and min(km_sizes) >= 2:
            hits += 1
    assert hits >= 4
    ok(f"clustering contrast (ball min=1 vs k-means min>=2 on {hits}/5)")


# ------------------------------------------------------------ determinism

def test_pipeline_determinism(tmp_path):
    runner = CliRunner()
    y_path = tmp_path / "y.csv"
    assert runner.invoke(cli_main, ["synth", "--n", "300", "--noise", "0.02",
                                    "--seed", "3", "--out",
                                    str(y_path)]).exit_code == 0
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(cli_main, [
            "build", "--input", str(y_path), "--axes", "x,y",
            "--color", "arm", "--epsilon", "0.12", "--seed", "0",
            "--winsor", "0.005,0.995", "--out", str(out)])
        assert result.exit_code == 0, result.output
        outputs.append(out)
    for fname in ("graph.json", "graph.dot", "membership.csv",
                  "ball_summary.csv", "retained_rows.csv"):
        assert (outputs[0] / fname).read_bytes() == \
            (outputs[1] / fname).read_bytes()
    m1 = json.loads((outputs[0] / "manifest.json").read_text())
    m2 = json.loads((outputs[1] / "manifest.json").read_text())
    assert m1["outputs"] == m2["outputs"]
    ok("pipeline determinism (byte-identical artifacts and hashes)")


# ---------------------------------------------------------------- service

CHAIN_CSV = "id,pos,f\n1,0,5\n2,1,10\n3,2,20\n4,3,30\n5,4,40\n"


def test_service_contract_suite():
    port = None
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(
        create_app(), host="127.0.0.1", port=port, log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    deadline = time.time() + 10
    while time.time() < deadline:
        try:
            httpx.get(url + "/docs", timeout=0.5)
            break
        except httpx.HTTPError:
            time.sleep(0.05)
    try:
        with httpx.Client(base_url=url, timeout=30) as client:
            # dataset upload examples
            r = client.post("/datasets", content="a,b\n1,2\n3,4\n5,6\n")
            assert r.status_code == 201
            assert r.json()["rows"] == 3
            assert client.post("/datasets", content="a\n1\nbad\n"
                               ).status_code == 400
            r1 = client.post("/datasets", content=CHAIN_CSV)
            r2 = client.post("/datasets", content=CHAIN_CSV)
            assert r1.json()["id"] != r2.json()["id"]
            ds_id = r1.json()["id"]

            # build examples
            one = client.post(f"/datasets/{ds_id}/graphs",
                              json={"axes": ["pos"], "epsilon": 99.0})
            assert len(one.json()["graph"]["vertices"]) == 1
            b1 = client.post(f"/datasets/{ds_id}/graphs",
                             json={"axes": ["pos"], "epsilon": 0.25})
            b2 = client.post(f"/datasets/{ds_id}/graphs",
                             json={"axes": ["pos"], "epsilon": 0.25})
            assert b1.json()["content_hash"] == b2.json()["content_hash"]
            assert client.post("/datasets/nope/graphs",
                               json={"axes": ["pos"], "epsilon": 0.25}
                               ).status_code == 404
            g_id = b1.json()["id"]

            # coloring examples
            r = client.get(f"/graphs/{g_id}/colorings/f")
            assert r.json()["values"] == [7.5, 20.0, 35.0]
            assert client.get(f"/graphs/{g_id}/colorings/zz"
                              ).status_code == 422

            # compare examples
            r = client.post(f"/graphs/{g_id}/compare",
                            json={"group_a": [1], "group_b": [1],
                                  "variables": ["f"]})
            assert r.json()["rows"][0]["diff"] == 0.0
            r = client.post(f"/graphs/{g_id}/compare",
                            json={"group_a": [1], "group_b": [3],
                                  "variables": ["f"]})
            assert r.json()["rows"][0]["diff"] == pytest.approx(-27.5)

            # GET purity: repeat reads byte-identical
            for path in (f"/datasets/{ds_id}", f"/graphs/{g_id}",
                         f"/graphs/{g_id}/colorings/f",
                         f"/graphs/{g_id}/summary"):
                assert client.get(path).content == client.get(path).content
    finally:
        server.should_exit = True
        thread.join(timeout=5)
    ok("service contract suite (live instance, pure GETs)")
