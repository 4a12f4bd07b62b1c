"""Pairwise ranking SVM trained by averaged subgradient descent.

The graded lists are turned into within-group ordered pairs; each pair
(i, j) with grade_i > grade_j contributes a hinge term on the score
difference, giving the convex objective

    f(w) = 1/2 ||w||^2 + (c / |P|) * sum_{(i,j) in P} max(0, 1 - w . (x_i - x_j))

The 1/2 ||w||^2 term makes f 1-strongly convex, so subgradient descent
with step 1/t and iterate averaging converges; the implementation shuffles
pairs each epoch with a seeded generator and runs vectorized minibatch
steps, making training deterministic given the seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..errors import NoPairs
from .model import LinearModel, QueryGroup, pair_differences

DEFAULT_C = 1.0
DEFAULT_MAX_EPOCHS = 200
DEFAULT_TOLERANCE = 1e-6
DEFAULT_BATCH_SIZE = 256


@dataclass
class SvmRankOptions:
    max_epochs: int = DEFAULT_MAX_EPOCHS
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 0
    batch_size: int = DEFAULT_BATCH_SIZE


def hinge_objective(w: np.ndarray, diffs: np.ndarray, c: float) -> float:
    margins = 1.0 - diffs @ w
    hinge = np.maximum(margins, 0.0).mean() if len(diffs) else 0.0
    return 0.5 * float(w @ w) + c * float(hinge)


def train_svmrank(
    groups: list[QueryGroup],
    c: float = DEFAULT_C,
    opts: SvmRankOptions | None = None,
) -> LinearModel:
    """Minimize the pairwise hinge objective; returns the best iterate seen.

    Non-convergence within max_epochs is not an error: the model carries
    metadata["converged"] = False and the best iterate is returned anyway.
    """
    if c <= 0:
        raise ValueError(f"regularization c must be > 0, got {c}")
    opts = opts if opts is not None else SvmRankOptions()
    diffs = pair_differences(groups)
    n_pairs = len(diffs)
    if n_pairs == 0:
        raise NoPairs("no within-group pairs with unequal grades")

    started = time.perf_counter()
    rng = np.random.default_rng(opts.seed)
    dim = diffs.shape[1]
    w = np.zeros(dim)
    averaged = np.zeros(dim)
    step = 0
    # any minimizer satisfies 1/2 ||w*||^2 <= f(w*) <= f(0) = c, so projecting
    # onto this ball never excludes it and keeps subgradients bounded
    radius = np.sqrt(2.0 * c)

    best_w = w.copy()
    best_obj = hinge_objective(w, diffs, c)  # equals c at w = 0
    prev_obj = np.inf  # compare successive epochs only, never the w = 0 start
    converged = False
    epochs_run = 0

    for epoch in range(opts.max_epochs):
        epochs_run = epoch + 1
        perm = rng.permutation(n_pairs)
        for start in range(0, n_pairs, opts.batch_size):
            batch = diffs[perm[start : start + opts.batch_size]]
            step += 1
            eta = 1.0 / step
            violated = batch[(batch @ w) < 1.0]
            grad = w.copy()
            if len(violated):
                grad -= (c / len(batch)) * violated.sum(axis=0)
            w -= eta * grad
            norm = np.linalg.norm(w)
            if norm > radius:
                w *= radius / norm
            averaged += (w - averaged) / step

        epoch_obj = hinge_objective(averaged, diffs, c)
        if epoch_obj < best_obj:
            best_obj = epoch_obj
            best_w = averaged.copy()
        current_obj = hinge_objective(w, diffs, c)
        if current_obj < best_obj:
            best_obj = current_obj
            best_w = w.copy()
        if np.isfinite(prev_obj) and abs(prev_obj - epoch_obj) <= opts.tolerance * max(
            abs(prev_obj), 1e-12
        ):
            converged = True
            break
        prev_obj = epoch_obj

    wall_time = time.perf_counter() - started
    schema = next((g.schema_version for g in groups if g.schema_version), None)
    return LinearModel(
        weights=best_w,
        schema_version=schema,
        trainer_tag="svmrank",
        metadata={
            "c": c,
            "seed": opts.seed,
            "max_epochs": opts.max_epochs,
            "tolerance": opts.tolerance,
            "batch_size": opts.batch_size,
            "pairs": n_pairs,
            "objective": best_obj,
            "epochs_run": epochs_run,
            "converged": converged,
            "wall_time_s": wall_time,
        },
    )
