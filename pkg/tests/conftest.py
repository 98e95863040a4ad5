import numpy as np
import pytest

from ballmapper.cover import Cover, CoverParams
from ballmapper.tabledata import DataTable, PointCloud


def make_cloud(coords, row_ids=None) -> PointCloud:
    """Point cloud straight from coordinates, bypassing normalization."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    n, d = coords.shape
    rows = row_ids or [str(i + 1) for i in range(n)]
    return PointCloud(coords=coords, axis_names=[f"a{j}" for j in range(d)],
                      scaling=[(0.0, 1.0)] * d, source_rows=rows)


def make_1d_cloud(values, row_ids=None) -> PointCloud:
    return make_cloud(np.asarray(values, dtype=float).reshape(-1, 1), row_ids)


@pytest.fixture
def chain_cloud():
    """Collinear points {0,1,2,3,4}; with epsilon=1 the greedy net picks 0,2,4."""
    return make_1d_cloud([0.0, 1.0, 2.0, 3.0, 4.0])


@pytest.fixture
def chain_cover(chain_cloud):
    return Cover(landmarks=[0, 2, 4],
                 members=[[0, 1], [1, 2, 3], [3, 4]],
                 params=CoverParams(epsilon=1.0),
                 cloud=chain_cloud)


@pytest.fixture
def chain_table():
    return DataTable(row_ids=["1", "2", "3", "4", "5"],
                     columns={"pos": [0.0, 1.0, 2.0, 3.0, 4.0],
                              "f": [5.0, 10.0, 20.0, 30.0, 40.0]})


def random_cloud(rng, n=None, d=None) -> PointCloud:
    n = n or int(rng.integers(2, 120))
    d = d or int(rng.integers(1, 8))
    return make_cloud(rng.random((n, d)))
