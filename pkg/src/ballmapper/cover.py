"""Greedy epsilon-net construction, ball covers, and the weighted cover graph.

The cover is built by repeatedly picking an uncovered point as a landmark
and absorbing everything within epsilon of it; vertices are balls weighted
by membership, edges mark nonempty intersections weighted by overlap size.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .tabledata import PointCloud

STRATEGIES = ("first", "random")


@dataclass(frozen=True)
class CoverParams:
    epsilon: float
    strategy: str = "first"  # "first" = lowest uncovered index; "random" = seeded
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown landmark strategy {self.strategy!r}")


@dataclass
class Cover:
    """Landmarks plus the (overlapping) membership list of each ball.

    Ball ids are 1-based and follow landmark discovery order. The cloud is
    kept so colorings can map point indices back to table rows.
    """

    landmarks: list[int]
    members: list[list[int]]  # sorted point indices per ball
    params: CoverParams
    cloud: PointCloud

    @property
    def n_balls(self) -> int:
        return len(self.landmarks)

    def ball_ids(self) -> list[int]:
        return list(range(1, self.n_balls + 1))

    def members_of(self, ball_id: int) -> list[int]:
        if not 1 <= ball_id <= self.n_balls:
            raise ValidationError(f"unknown ball id {ball_id}")
        return self.members[ball_id - 1]


@dataclass
class BallMapperGraph:
    """Abstract cover graph: vertex weight |C_i|, edge weight |C_i ∩ C_j|."""

    vertex_weights: list[int]  # index i -> weight of ball i+1
    edges: list[tuple[int, int, int]]  # (ball_id_i, ball_id_j, weight), i < j

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_weights)

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for i, j, _ in self.edges:
            deg[i - 1] += 1
            deg[j - 1] += 1
        return deg

    def is_connected(self) -> bool:
        if self.n_vertices <= 1:
            return True
        adj = {i: set() for i in range(1, self.n_vertices + 1)}
        for i, j, _ in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        seen = {1}
        stack = [1]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.n_vertices


def build_epsilon_net(cloud: PointCloud, params: CoverParams) -> list[int]:
    """Greedy net: pick an uncovered point, cover its epsilon-ball, repeat."""
    if cloud.n == 0:
        raise ValidationError("cannot build a net over an empty cloud")
    coords = cloud.coords
    covered = np.zeros(cloud.n, dtype=bool)
    rng = np.random.default_rng(params.seed) if params.strategy == "random" else None
    landmarks: list[int] = []
    while not covered.all():
        uncovered = np.flatnonzero(~covered)
        if rng is None:
            idx = int(uncovered[0])
        else:
            idx = int(rng.choice(uncovered))
        dist = np.linalg.norm(coords - coords[idx], axis=1)
        covered |= dist <= params.epsilon
        landmarks.append(idx)
    return landmarks


def build_cover(cloud: PointCloud, landmarks: list[int],
                epsilon: float) -> Cover:
    """Membership lists: every point within epsilon of each landmark."""
    coords = cloud.coords
    members = []
    for lm in landmarks:
        if not 0 <= lm < cloud.n:
            raise ValidationError(f"landmark index out of range: {lm}")
        dist = np.linalg.norm(coords - coords[lm], axis=1)
        members.append([int(i) for i in np.flatnonzero(dist <= epsilon)])
    return Cover(landmarks=list(landmarks), members=members,
                 params=CoverParams(epsilon=epsilon), cloud=cloud)


def build_ballmapper(cloud: PointCloud, params: CoverParams
                     ) -> tuple[Cover, "BallMapperGraph"]:
    """Net + cover + graph in one pass, preserving the params."""
    landmarks = build_epsilon_net(cloud, params)
    cover = build_cover(cloud, landmarks, params.epsilon)
    cover.params = params
    return cover, build_graph(cover)


def build_graph(cover: Cover) -> BallMapperGraph:
    """Edges between every pair of balls with intersecting members.

    Accumulated point by point (each shared point bumps the weight of every
    ball pair containing it), which avoids the quadratic all-pairs scan.
    """
    containing: dict[int, list[int]] = {}
    for ball_id, mem in enumerate(cover.members, start=1):
        for p in mem:
            containing.setdefault(p, []).append(ball_id)
    weights: dict[tuple[int, int], int] = {}
    for balls in containing.values():
        for a in range(len(balls)):
            for b in range(a + 1, len(balls)):
                pair = (balls[a], balls[b])
                weights[pair] = weights.get(pair, 0) + 1
    edges = [(i, j, w) for (i, j), w in sorted(weights.items())]
    return BallMapperGraph(
        vertex_weights=[len(m) for m in cover.members], edges=edges)


@dataclass
class DiameterReport:
    """Max intra-ball pairwise distance per ball, against the 2*epsilon bound."""

    epsilon: float
    max_intra: list[float]
    violations: list[int] = field(default_factory=list)  # ball ids over bound


def diameter_bound_check(cover: Cover, cloud: PointCloud,
                         slack: float = 1e-12) -> DiameterReport:
    coords = cloud.coords
    max_intra = []
    violations = []
    bound = 2 * cover.params.epsilon + slack
    for ball_id, mem in enumerate(cover.members, start=1):
        pts = coords[mem]
        if len(mem) < 2:
            max_intra.append(0.0)
            continue
        diff = pts[:, None, :] - pts[None, :, :]
        worst = float(np.sqrt((diff ** 2).sum(axis=2)).max())
        max_intra.append(worst)
        if worst > bound:
            violations.append(ball_id)
    return DiameterReport(epsilon=cover.params.epsilon, max_intra=max_intra,
                          violations=violations)


def graph_to_json(cover: Cover, graph: BallMapperGraph,
                  colorings: dict[str, list] | None = None) -> dict:
    """Serializable graph document; members carry row_ids, not point indices."""
    rows = cover.cloud.source_rows
    doc = {
        "vertices": [
            {"id": ball_id,
             "weight": graph.vertex_weights[ball_id - 1],
             "landmark": rows[cover.landmarks[ball_id - 1]],
             "members": [rows[p] for p in cover.members[ball_id - 1]]}
            for ball_id in cover.ball_ids()
        ],
        "edges": [
            {"source": i, "target": j, "weight": w} for i, j, w in graph.edges
        ],
        "params": {"epsilon": cover.params.epsilon,
                   "strategy": cover.params.strategy,
                   "seed": cover.params.seed},
    }
    if colorings:
        doc["colorings"] = colorings
    return doc


def graph_json_dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def cover_from_graph_json(doc: dict, cloud: PointCloud) -> Cover:
    """Rebuild a Cover from an exported graph document and its point cloud."""
    row_to_point = {rid: i for i, rid in enumerate(cloud.source_rows)}
    landmarks = []
    members = []
    for vertex in sorted(doc["vertices"], key=lambda v: v["id"]):
        try:
            landmarks.append(row_to_point[vertex["landmark"]])
            members.append(sorted(row_to_point[r] for r in vertex["members"]))
        except KeyError as exc:
            raise ValidationError(
                f"graph artifact references unknown row {exc.args[0]!r}")
    params = doc.get("params", {})
    return Cover(landmarks=landmarks, members=members,
                 params=CoverParams(epsilon=float(params.get("epsilon", 1.0)),
                                    strategy=params.get("strategy", "first"),
                                    seed=int(params.get("seed", 0))),
                 cloud=cloud)


def graph_to_dot(graph: BallMapperGraph) -> str:
    """DOT text with vertex label = ball id and width scaled by sqrt(weight)."""
    lines = ["graph ballmapper {", "  node [shape=circle];"]
    for ball_id, w in enumerate(graph.vertex_weights, start=1):
        width = 0.3 * math.sqrt(w)
        lines.append(
            f'  {ball_id} [label="{ball_id}", width={width:.4f}, weight={w}];')
    for i, j, w in graph.edges:
        lines.append(f"  {i} -- {j} [weight={w}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def membership_to_csv(cover: Cover, stream) -> None:
    """One (row_id, ball_id) line per membership; rows repeat across balls."""
    writer = csv.writer(stream)
    writer.writerow(["row_id", "ball_id"])
    rows = cover.cloud.source_rows
    for ball_id, mem in enumerate(cover.members, start=1):
        for p in mem:
            writer.writerow([rows[p], ball_id])
