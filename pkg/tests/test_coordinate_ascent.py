from __future__ import annotations

import numpy as np
import pytest

from credscore.ranking import (
    CoordinateAscentOptions,
    QueryGroup,
    ndcg_of_scores,
    train_coordinate_ascent,
)

from .synth import ranked_groups

DIM = 45


def grade_feature_group(n=12) -> QueryGroup:
    rng = np.random.default_rng(0)
    grades = rng.integers(1, 6, size=n)
    X = np.zeros((n, DIM))
    X[:, 0] = grades
    return QueryGroup("g", X, grades)


def test_single_informative_feature_reaches_perfect_ndcg():
    # ordering by feature 0 descending IS the ideal ordering, so the
    # exhaustive-oracle target for mean NDCG@10 is exactly 1.0
    group = grade_feature_group()
    ideal = ndcg_of_scores(group.features[:, 0], group.grades, 10)
    assert ideal == 1.0
    model = train_coordinate_ascent(
        [group], opts=CoordinateAscentOptions(seed=0, target_cutoff=10)
    )
    achieved = ndcg_of_scores(group.features @ model.weights, group.grades, 10)
    assert achieved == pytest.approx(1.0, abs=1e-9)


def test_zero_sweeps_returns_initialization_unchanged():
    group = grade_feature_group()
    init = np.linspace(-1.0, 1.0, DIM)
    model = train_coordinate_ascent(
        [group],
        opts=CoordinateAscentOptions(
            n_restarts=1, max_sweeps=0, seed=5, initial_weights=init
        ),
    )
    assert np.array_equal(model.weights, init)


def test_determinism_given_seed():
    groups, _ = ranked_groups(3, 25, seed=8)
    opts = CoordinateAscentOptions(seed=17, n_restarts=2, max_sweeps=4)
    a = train_coordinate_ascent(groups, opts=opts)
    b = train_coordinate_ascent(groups, opts=opts)
    assert np.array_equal(a.weights, b.weights)


def test_accepted_steps_never_decrease_mean_ndcg():
    groups, _ = ranked_groups(3, 25, seed=2)
    model = train_coordinate_ascent(
        groups, opts=CoordinateAscentOptions(seed=4, n_restarts=3, max_sweeps=6)
    )
    traces = model.metadata["accepted_ndcg_traces"]
    assert len(traces) == 3
    for trace in traces:
        assert all(b >= a for a, b in zip(trace, trace[1:])), trace


def test_weights_unit_l1_after_sweeps():
    groups, _ = ranked_groups(2, 20, seed=6)
    model = train_coordinate_ascent(
        groups, opts=CoordinateAscentOptions(seed=1, n_restarts=1, max_sweeps=3)
    )
    assert np.abs(model.weights).sum() == pytest.approx(1.0, rel=1e-9)


def test_empty_groups_rejected():
    with pytest.raises(ValueError):
        train_coordinate_ascent([])


def test_grid_has_21_points():
    from credscore.ranking import LineSearchGrid

    grid = LineSearchGrid()
    assert len(grid.candidates(0.5)) == 21
    assert len(grid.candidates(0.0)) == 21


def test_synthetic_recovery_quality():
    groups, _ = ranked_groups(5, 40, seed=33)
    model = train_coordinate_ascent(groups, opts=CoordinateAscentOptions(seed=33))
    mean25 = float(
        np.mean([ndcg_of_scores(g.features @ model.weights, g.grades, 25) for g in groups])
    )
    assert mean25 >= 0.90


def test_trainer_tag_and_metadata():
    groups, _ = ranked_groups(2, 15, seed=44)
    model = train_coordinate_ascent(
        groups, opts=CoordinateAscentOptions(seed=9, n_restarts=2, max_sweeps=2)
    )
    assert model.trainer_tag == "coordinate_ascent"
    assert model.metadata["n_restarts"] == 2
    assert model.metadata["wall_time_s"] >= 0
    assert 0.0 <= model.metadata["mean_ndcg"] <= 1.0
