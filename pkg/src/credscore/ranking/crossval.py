"""k-fold cross-validation with per-fold quality and timing.

Folds are query groups when enough groups exist; with fewer groups than
folds, examples are split within each group stratified by grade, and each
fold's slice of a group is evaluated as its own query. Fold assignment is
deterministic given the seed, so two trainers evaluated with the same seed
see identical folds and their wall times are comparable.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import InsufficientData
from .metrics import ndcg_of_scores
from .model import LinearModel, QueryGroup

DEFAULT_CUTOFFS = (25, 50, 75, 100)

Trainer = Callable[[list[QueryGroup]], LinearModel]


@dataclass
class FoldResult:
    fold: int
    n_train_examples: int
    n_test_examples: int
    n_test_groups: int
    ndcg: dict[int, float]
    train_time_s: float
    test_time_s: float


@dataclass
class CvReport:
    trainer_tag: str
    k: int
    seed: int
    fold_unit: str  # "group" or "within_group"
    cutoffs: tuple[int, ...]
    folds: list[FoldResult] = field(default_factory=list)

    def mean_ndcg(self, cutoff: int) -> float:
        return float(np.mean([f.ndcg[cutoff] for f in self.folds]))

    def mean_train_time(self) -> float:
        return float(np.mean([f.train_time_s for f in self.folds]))

    def mean_test_time(self) -> float:
        return float(np.mean([f.test_time_s for f in self.folds]))

    def to_dict(self) -> dict:
        return {
            "trainer": self.trainer_tag,
            "k": self.k,
            "seed": self.seed,
            "fold_unit": self.fold_unit,
            "cutoffs": list(self.cutoffs),
            "folds": [
                {
                    "fold": f.fold,
                    "n_train_examples": f.n_train_examples,
                    "n_test_examples": f.n_test_examples,
                    "n_test_groups": f.n_test_groups,
                    "ndcg": {str(c): f.ndcg[c] for c in self.cutoffs},
                    "train_time_s": f.train_time_s,
                    "test_time_s": f.test_time_s,
                }
                for f in self.folds
            ],
            "mean": {
                "ndcg": {str(c): self.mean_ndcg(c) for c in self.cutoffs},
                "train_time_s": self.mean_train_time(),
                "test_time_s": self.mean_test_time(),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _group_folds(n_groups: int, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    order = rng.permutation(n_groups)
    return [order[i::k] for i in range(k)]


def _within_group_folds(
    groups: Sequence[QueryGroup], k: int, rng: np.random.Generator
) -> list[list[tuple[int, np.ndarray]]]:
    """Per-fold (group index, example indices) assignments, stratified by grade."""
    assignments: list[list[tuple[int, list[int]]]] = [[] for _ in range(k)]
    for gi, group in enumerate(groups):
        per_fold: list[list[int]] = [[] for _ in range(k)]
        for grade in np.unique(group.grades):
            idx = np.nonzero(group.grades == grade)[0]
            idx = idx[rng.permutation(len(idx))]
            for j, example in enumerate(idx):
                per_fold[j % k].append(int(example))
        for f in range(k):
            if per_fold[f]:
                assignments[f].append((gi, per_fold[f]))
    return [
        [(gi, np.asarray(sorted(idx))) for gi, idx in fold_items]
        for fold_items in assignments
    ]


def _evaluate(model: LinearModel, test_groups: list[QueryGroup], cutoffs) -> dict[int, float]:
    scores = [g.features @ model.weights for g in test_groups]
    return {
        c: float(np.mean([ndcg_of_scores(s, g.grades, c) for s, g in zip(scores, test_groups)]))
        for c in cutoffs
    }


def cross_validate(
    groups: list[QueryGroup],
    k: int = 4,
    trainer: Trainer | None = None,
    cutoffs: Sequence[int] = DEFAULT_CUTOFFS,
    seed: int = 0,
    trainer_tag: str | None = None,
) -> CvReport:
    if trainer is None:
        raise ValueError("a trainer callable is required")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    total = sum(len(g) for g in groups)
    rng = np.random.default_rng(seed)
    cutoffs = tuple(cutoffs)

    if len(groups) >= k:
        fold_unit = "group"
        folds = _group_folds(len(groups), k, rng)
        splits = []
        for f in range(k):
            test_idx = set(folds[f].tolist())
            train = [g for i, g in enumerate(groups) if i not in test_idx]
            test = [groups[i] for i in sorted(test_idx)]
            splits.append((train, test))
    elif total >= 2 * k:
        fold_unit = "within_group"
        assignments = _within_group_folds(groups, k, rng)
        splits = []
        for f in range(k):
            test = [
                QueryGroup(
                    event_id=f"{groups[gi].event_id}#fold{f}",
                    features=groups[gi].features[idx],
                    grades=groups[gi].grades[idx],
                    schema_version=groups[gi].schema_version,
                )
                for gi, idx in assignments[f]
            ]
            train = []
            for gi, group in enumerate(groups):
                test_idx = dict(assignments[f]).get(gi)
                keep = (
                    np.setdiff1d(np.arange(len(group)), test_idx)
                    if test_idx is not None
                    else np.arange(len(group))
                )
                if len(keep):
                    train.append(
                        QueryGroup(
                            event_id=group.event_id,
                            features=group.features[keep],
                            grades=group.grades[keep],
                            schema_version=group.schema_version,
                        )
                    )
            splits.append((train, test))
    else:
        raise InsufficientData(
            f"need >= {k} groups or >= {2 * k} examples, got {len(groups)} groups / {total} examples"
        )

    first_tag = trainer_tag
    report: CvReport | None = None
    for f, (train, test) in enumerate(splits):
        t0 = time.perf_counter()
        model = trainer(train)
        train_time = time.perf_counter() - t0
        t0 = time.perf_counter()
        ndcg = _evaluate(model, test, cutoffs)
        test_time = time.perf_counter() - t0
        if report is None:
            report = CvReport(
                trainer_tag=first_tag or model.trainer_tag,
                k=k,
                seed=seed,
                fold_unit=fold_unit,
                cutoffs=cutoffs,
            )
        report.folds.append(
            FoldResult(
                fold=f,
                n_train_examples=sum(len(g) for g in train),
                n_test_examples=sum(len(g) for g in test),
                n_test_groups=len(test),
                ndcg=ndcg,
                train_time_s=train_time,
                test_time_s=test_time,
            )
        )
    assert report is not None
    return report


def comparison_table(reports: list[CvReport]) -> str:
    """Plain-text table: one column per trainer, NDCG rows then timing rows."""
    if not reports:
        return ""
    cutoffs = reports[0].cutoffs
    names = [r.trainer_tag for r in reports]
    width = max(16, *(len(n) + 2 for n in names))
    header = f"{'':16}" + "".join(f"{n:>{width}}" for n in names)
    lines = [header, "-" * len(header)]
    for c in cutoffs:
        row = f"{f'NDCG@{c}':16}" + "".join(f"{r.mean_ndcg(c):>{width}.4f}" for r in reports)
        lines.append(row)
    lines.append(
        f"{'Time (training)':16}"
        + "".join(f"{r.mean_train_time():>{width - 2}.3f} s" for r in reports)
    )
    lines.append(
        f"{'Time (testing)':16}"
        + "".join(f"{r.mean_test_time():>{width - 2}.3f} s" for r in reports)
    )
    return "\n".join(lines)
