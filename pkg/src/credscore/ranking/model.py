"""Query groups, the linear ranking model, and ranking application."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import SchemaMismatch
from ..features import FeatureVector, matrix_from_vectors
from ..labeling import LabeledExample

# grade 0 is allowed so synthetic benchmarks can use unjudged items
GRADE_RANGE = (0, 5)


@dataclass
class QueryGroup:
    """One event's examples: a feature matrix with parallel integer grades."""

    event_id: str
    features: np.ndarray  # (m, d)
    grades: np.ndarray  # (m,)
    schema_version: str | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.grades = np.asarray(self.grades, dtype=np.int64)
        if self.features.ndim != 2 or len(self.grades) != self.features.shape[0]:
            raise ValueError("features must be (m, d) with one grade per row")
        lo, hi = GRADE_RANGE
        if len(self.grades) and (self.grades.min() < lo or self.grades.max() > hi):
            raise ValueError(f"grades must lie in [{lo}, {hi}]")

    def __len__(self) -> int:
        return len(self.grades)

    @classmethod
    def from_pairs(
        cls, event_id: str, examples: Sequence[tuple[FeatureVector, int]]
    ) -> "QueryGroup":
        vectors = [fv for fv, _ in examples]
        grades = [g for _, g in examples]
        return cls(
            event_id=event_id,
            features=matrix_from_vectors(vectors),
            grades=np.asarray(grades),
            schema_version=vectors[0].schema_version if vectors else None,
        )


def groups_from_examples(examples: Iterable[LabeledExample]) -> list[QueryGroup]:
    by_event: dict[str, list[LabeledExample]] = {}
    for ex in examples:
        by_event.setdefault(ex.event_id, []).append(ex)
    return [
        QueryGroup.from_pairs(event_id, [(ex.features, ex.grade) for ex in items])
        for event_id, items in by_event.items()
    ]


@dataclass
class LinearModel:
    weights: np.ndarray
    schema_version: str | None
    trainer_tag: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 1:
            raise ValueError("weights must be a vector")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")

    def score(self, features: np.ndarray) -> np.ndarray:
        return np.asarray(features, dtype=np.float64) @ self.weights


def rank(
    model: LinearModel, items: Sequence[FeatureVector] | np.ndarray
) -> tuple[list[int], np.ndarray]:
    """Order items by descending model score; ties keep input order.

    Returns (ordering of input indices, raw scores in input order).
    """
    if isinstance(items, np.ndarray):
        matrix = items
    else:
        matrix = matrix_from_vectors(list(items))
        if items and model.schema_version is not None:
            if items[0].schema_version != model.schema_version:
                raise SchemaMismatch(
                    f"items schema {items[0].schema_version!r} != model "
                    f"schema {model.schema_version!r}"
                )
    if matrix.shape[1] != len(model.weights):
        raise SchemaMismatch(
            f"items have {matrix.shape[1]} features, model has {len(model.weights)}"
        )
    scores = model.score(matrix)
    ordering = np.argsort(-scores, kind="stable").tolist()
    return ordering, scores


def pair_differences(groups: Sequence[QueryGroup]) -> np.ndarray:
    """Within-group difference rows x_i - x_j for every pair with grade_i > grade_j.

    Pairs never cross groups and grade ties generate nothing.
    """
    diffs = []
    for group in groups:
        g = group.grades
        higher, lower = np.nonzero(g[:, None] > g[None, :])
        if len(higher):
            diffs.append(group.features[higher] - group.features[lower])
    if not diffs:
        d = groups[0].features.shape[1] if groups else 0
        return np.empty((0, d))
    return np.vstack(diffs)
