"""Learning-to-rank core: metrics, trainers, ranking, cross-validation."""

from .coordinate_ascent import (
    CoordinateAscentOptions,
    LineSearchGrid,
    train_coordinate_ascent,
)
from .crossval import CvReport, FoldResult, comparison_table, cross_validate
from .metrics import dcg_at_n, ideal_dcg_at, ndcg_at_n, ndcg_of_scores
from .model import (
    LinearModel,
    QueryGroup,
    groups_from_examples,
    pair_differences,
    rank,
)
from .svmrank import SvmRankOptions, hinge_objective, train_svmrank

__all__ = [
    "CoordinateAscentOptions",
    "CvReport",
    "FoldResult",
    "LineSearchGrid",
    "LinearModel",
    "QueryGroup",
    "SvmRankOptions",
    "comparison_table",
    "cross_validate",
    "dcg_at_n",
    "groups_from_examples",
    "hinge_objective",
    "ideal_dcg_at",
    "ndcg_at_n",
    "ndcg_of_scores",
    "pair_differences",
    "rank",
    "train_coordinate_ascent",
    "train_svmrank",
]
