"""Ball Mapper engine: covers, cover graphs, colorings and comparisons."""

from .coloring import (assign_unique, ball_summary, compare_balls,
                       induce_coloring)
from .cover import (BallMapperGraph, Cover, CoverParams, build_ballmapper,
                    build_cover, build_epsilon_net, build_graph,
                    diameter_bound_check)
from .errors import (BallMapperError, DataError, NumericError,
                     ValidationError)
from .models import (cluster_size_report, kmeans, ols_fit,
                     residual_coloring)
from .tabledata import (DataTable, FormatSpec, PointCloud, WinsorSpec,
                        distance, generate_y_cloud, load_table,
                        normalize_minmax, winsorize)

__all__ = [
    "BallMapperError", "BallMapperGraph", "Cover", "CoverParams",
    "DataTable", "DataError", "FormatSpec", "NumericError", "PointCloud",
    "ValidationError", "WinsorSpec", "assign_unique", "ball_summary",
    "build_ballmapper", "build_cover", "build_epsilon_net", "build_graph",
    "cluster_size_report", "compare_balls", "diameter_bound_check",
    "distance", "generate_y_cloud", "induce_coloring", "kmeans",
    "load_table", "normalize_minmax", "ols_fit", "residual_coloring",
    "winsorize",
]
