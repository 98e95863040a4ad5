"""Cross-sectional OLS for residual colorings, plus the k-means harness.

OLS goes through a QR decomposition (normal equations stay in the test
oracle only); k-means is Lloyd's algorithm with deterministic seeded
initialization and farthest-point repair of empty clusters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .coloring import Coloring, coloring_from_values
from .cover import Cover
from .errors import NumericError, ValidationError
from .tabledata import DataTable, PointCloud


@dataclass
class RegressionFit:
    names: list[str]  # "const" then regressors in input order
    coefficients: np.ndarray
    standard_errors: np.ndarray
    t_abs: np.ndarray
    residuals: np.ndarray
    r_squared: float
    row_ids: list[str]  # rows actually used, in table order

    def stars(self, i: int) -> str:
        """Two-sided normal-approximation significance at 5% / 1% / 0.1%."""
        t = self.t_abs[i]
        if t > 3.290527:
            return "***"
        if t > 2.575829:
            return "**"
        if t > 1.959964:
            return "*"
        return ""


def ols_fit(table: DataTable, regressors: list[str],
            response: str) -> RegressionFit:
    """Least squares of response on an intercept plus the named regressors.

    Rows missing any used value are excluded. Classical homoskedastic
    standard errors; |t| statistics per coefficient.
    """
    used = list(regressors) + [response]
    cols = {name: table.numeric_column(name) for name in used}
    keep = [i for i in range(table.n_rows)
            if all(cols[name][i] is not None for name in used)]
    n, p = len(keep), len(regressors)
    if n <= p + 1:
        raise NumericError(f"too few complete rows ({n}) for {p} regressors")

    X = np.column_stack(
        [np.ones(n)] + [[cols[name][i] for i in keep] for name in regressors])
    y = np.array([cols[response][i] for i in keep], dtype=float)

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    tol = max(X.shape) * np.finfo(float).eps * (diag.max() if diag.size else 0)
    bad = np.flatnonzero(diag <= tol)
    if bad.size:
        names = ["const"] + list(regressors)
        culprits = ", ".join(names[i] for i in bad)
        raise NumericError(f"design matrix is rank deficient (columns: {culprits})")

    beta = solve_triangular(r, q.T @ y)
    residuals = y - X @ beta
    rss = float(residuals @ residuals)
    dof = n - p - 1
    s2 = rss / dof
    r_inv = solve_triangular(r, np.eye(p + 1))
    se = np.sqrt(s2 * (r_inv ** 2).sum(axis=1))
    tss = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 if tss == 0 else 1.0 - rss / tss

    # se can hit exact 0 on noiseless fits; |t| is infinite there
    t_abs = np.divide(np.abs(beta), se, out=np.full_like(beta, np.inf),
                      where=se > 0)
    return RegressionFit(
        names=["const"] + list(regressors),
        coefficients=beta,
        standard_errors=se,
        t_abs=t_abs,
        residuals=residuals,
        r_squared=r_squared,
        row_ids=[table.row_ids[i] for i in keep])


def residual_coloring(fit: RegressionFit,
                      cover: Cover) -> tuple[Coloring, Coloring]:
    """Per-ball mean residual and mean absolute residual colorings."""
    by_row = dict(zip(fit.row_ids, fit.residuals))
    per_point = []
    for rid in cover.cloud.source_rows:
        if rid not in by_row:
            raise ValidationError(
                f"fit rows do not align with the cover's cloud (missing {rid!r})")
        per_point.append(float(by_row[rid]))
    return (coloring_from_values(cover, "residuals", per_point),
            coloring_from_values(cover, "abs_residuals",
                                 [abs(v) for v in per_point]))


@dataclass
class Clustering:
    k: int
    assignments: np.ndarray  # (n,) cluster index per point
    centroids: np.ndarray  # (k, d)
    objective: float  # sum of squared point-to-centroid distances
    iterations_run: int
    objective_history: list[float] = field(default_factory=list)

    def sizes(self) -> list[int]:
        return np.bincount(self.assignments, minlength=self.k).tolist()


def kmeans(cloud: PointCloud, k: int, seed: int = 0,
           max_iter: int = 100) -> Clustering:
    """Lloyd iterations from k distinct seeded data points.

    Stops at an assignment fixpoint or max_iter; an emptied cluster is
    re-seeded to the point farthest from its former centroid.
    """
    n = cloud.n
    if k == 0:
        raise ValidationError("k must be at least 1")
    if k > n:
        raise ValidationError(f"k = {k} exceeds the number of points ({n})")
    coords = cloud.coords
    rng = np.random.default_rng(seed)
    centroids = coords[rng.choice(n, size=k, replace=False)].copy()

    def assign(cents):
        d2 = ((coords[:, None, :] - cents[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        return labels, float(d2[np.arange(n), labels].sum())

    assignments, objective = assign(centroids)
    history = [objective]
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        new_centroids = centroids.copy()
        for j in range(k):
            mask = assignments == j
            if mask.any():
                new_centroids[j] = coords[mask].mean(axis=0)
            else:
                away = ((coords - centroids[j]) ** 2).sum(axis=1)
                new_centroids[j] = coords[away.argmax()]
        new_assignments, new_objective = assign(new_centroids)
        if new_objective > history[-1] + 1e-9:
            raise NumericError("k-means objective increased")
        history.append(new_objective)
        centroids = new_centroids
        if np.array_equal(new_assignments, assignments):
            assignments, objective = new_assignments, new_objective
            break
        assignments, objective = new_assignments, new_objective

    return Clustering(k=k, assignments=assignments, centroids=centroids,
                      objective=objective, iterations_run=iterations,
                      objective_history=history)


@dataclass
class ClusterSizeReport:
    method: str
    groups: int
    min_size: int
    max_size: int


def cluster_size_report(ballmapper_partition: dict[int, list[int]],
                        kmeans_clusterings: list[Clustering]
                        ) -> list[ClusterSizeReport]:
    """Size table contrasting unique-assignment balls with k-means runs.

    Row order: first clustering, the ball partition, then the remaining
    clusterings (user-k, ball mapper, k = ball count).
    """
    sizes = [len(v) for v in ballmapper_partition.values()]
    bm_row = ClusterSizeReport(method="ball mapper", groups=len(sizes),
                               min_size=min(sizes), max_size=max(sizes))
    rows = []
    for i, clustering in enumerate(kmeans_clusterings):
        csizes = [s for s in clustering.sizes() if s > 0]
        rows.append(ClusterSizeReport(
            method=f"k-means (k={clustering.k})", groups=len(csizes),
            min_size=min(csizes), max_size=max(csizes)))
        if i == 0:
            rows.append(bm_row)
    if not kmeans_clusterings:
        rows.append(bm_row)
    return rows
