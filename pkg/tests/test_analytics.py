from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from credscore.errors import EmptyData, EmptyFeedback, EmptySubset, ValidationError
from credscore.service.analytics import (
    feedback_summary,
    latency_report,
    score_distribution,
)
from credscore.service.stores import FeedbackEntry, ScoredTweetRecord

NOW = datetime(2014, 5, 1, tzinfo=timezone.utc)


def entry(verdict, system=4, suggested=None, token="tok", tweet_id="t", at=NOW):
    return FeedbackEntry(
        tweet_id=tweet_id,
        client_token=token,
        verdict=verdict,
        system_score_at_time=system,
        suggested_score=suggested,
        received_at=at,
    )


def agree_disagree_store(n_agree: int, n_disagree: int) -> list[FeedbackEntry]:
    entries = []
    for i in range(n_agree):
        entries.append(entry("agree", tweet_id=f"a{i}", at=NOW + timedelta(seconds=i)))
    for i in range(n_disagree):
        # spread suggested scores so higher/lower/magnitudes are populated
        suggested = 1 + (i % 7)
        system = 4
        if suggested == system:
            suggested = 7
        entries.append(
            entry(
                "disagree",
                system=system,
                suggested=suggested,
                tweet_id=f"d{i}",
                at=NOW + timedelta(seconds=10000 + i),
            )
        )
    return entries


def test_table_layout_percentages_511_of_1273():
    entries = agree_disagree_store(511, 1273 - 511)
    summary = feedback_summary(entries, seed=1)
    assert summary.n == 1273
    assert summary.pct_agreed.value == pytest.approx(40.14, abs=0.01)
    assert summary.pct_disagreed.value == pytest.approx(59.86, abs=0.01)
    assert summary.pct_agreed.value + summary.pct_disagreed.value == pytest.approx(100.0)
    # higher + lower cover every disagreement here (no zero-delta entries)
    assert summary.pct_should_be_higher.value + summary.pct_should_be_lower.value == (
        pytest.approx(summary.pct_disagreed.value)
    )
    hist_total = sum(p.value for p in summary.magnitude_histogram.values())
    assert hist_total == pytest.approx(summary.pct_disagreed.value)


def test_bootstrap_ci_contains_point_estimate():
    entries = agree_disagree_store(511, 762)
    summary = feedback_summary(entries, seed=3)
    for stat in (
        summary.pct_agreed,
        summary.pct_disagreed,
        summary.pct_should_be_higher,
        summary.pct_should_be_lower,
        *summary.magnitude_histogram.values(),
    ):
        assert stat.ci_low <= stat.value <= stat.ci_high


def test_bootstrap_deterministic_given_seed():
    entries = agree_disagree_store(50, 70)
    a = feedback_summary(entries, seed=9)
    b = feedback_summary(entries, seed=9)
    assert a.to_dict() == b.to_dict()
    c = feedback_summary(entries, seed=10)
    assert a.to_dict() != c.to_dict()


def test_all_agree_collapses_ci():
    summary = feedback_summary([entry("agree", tweet_id=str(i)) for i in range(20)], seed=0)
    assert summary.pct_agreed.value == 100.0
    assert (summary.pct_agreed.ci_low, summary.pct_agreed.ci_high) == (100.0, 100.0)
    assert summary.pct_disagreed.value == 0.0


def test_single_max_magnitude_disagreement():
    summary = feedback_summary([entry("disagree", system=1, suggested=7)], seed=0)
    assert summary.magnitude_histogram[6].value == 100.0
    assert all(summary.magnitude_histogram[m].value == 0.0 for m in range(1, 6))
    assert summary.pct_should_be_higher.value == 100.0


def test_higher_lower_split_sign():
    entries = [
        entry("disagree", system=4, suggested=6, tweet_id="h"),
        entry("disagree", system=4, suggested=1, tweet_id="l1"),
        entry("disagree", system=4, suggested=2, tweet_id="l2"),
        entry("agree", tweet_id="a1"),
    ]
    summary = feedback_summary(entries, seed=0)
    assert summary.pct_should_be_higher.value == pytest.approx(25.0)
    assert summary.pct_should_be_lower.value == pytest.approx(50.0)
    assert summary.magnitude_histogram[2].value == pytest.approx(50.0)  # |6-4| and |2-4|
    assert summary.magnitude_histogram[3].value == pytest.approx(25.0)  # |1-4|


def test_empty_feedback_raises():
    with pytest.raises(EmptyFeedback):
        feedback_summary([])


def test_feedback_entry_validation():
    with pytest.raises(ValidationError):
        entry("disagree", suggested=None)
    with pytest.raises(ValidationError):
        entry("agree", suggested=5)
    with pytest.raises(ValidationError):
        entry("disagree", suggested=9)
    with pytest.raises(ValidationError):
        entry("agree", system=0)


# --- latency report ---


def test_latency_uniform_grid_cdf():
    report = latency_report([float(i) for i in range(1, 101)])
    cdf = dict(report.cdf)
    assert cdf[50.0] == pytest.approx(0.50)
    assert cdf[100.0] == 1.0


def test_latency_single_record():
    report = latency_report([7.0], quantiles=(0.5, 0.99))
    assert report.quantiles[0.5] == 7.0
    assert report.quantiles[0.99] == 7.0
    assert report.cdf == [(7.0, 1.0)]


def test_latency_cdf_non_decreasing_ends_at_one():
    rng = np.random.default_rng(4)
    report = latency_report(rng.exponential(scale=20.0, size=500).tolist())
    fractions = [f for _, f in report.cdf]
    assert all(b >= a for a, b in zip(fractions, fractions[1:]))
    assert fractions[-1] == 1.0
    values = [v for v, _ in report.cdf]
    assert values == sorted(values)


def test_latency_quantiles_linear_interpolation():
    report = latency_report([10.0, 20.0], quantiles=(0.5,))
    assert report.quantiles[0.5] == pytest.approx(15.0)


def test_latency_empty_raises():
    with pytest.raises(EmptyData):
        latency_report([])


# --- distribution report ---


def scored(tweet_id, text, display, raw=0.0):
    return ScoredTweetRecord(
        tweet_id=tweet_id, text=text, raw=raw, display=display, computed_at=NOW
    )


def test_constructed_dominance():
    store = [scored(f"c{i}", "crisis flood update", 7) for i in range(30)]
    store += [scored(f"b{i}", "lunch was great", 1) for i in range(70)]
    report = score_distribution(["crisis"], store, background_sample_size=100, seed=0)
    assert report.subset_n == 30
    subset_cdf = np.cumsum([report.subset_histogram[d] for d in range(1, 8)])
    background_cdf = np.cumsum([report.background_histogram[d] for d in range(1, 8)])
    # first-order stochastic dominance: subset CDF never above background's
    assert np.all(subset_cdf <= background_cdf + 1e-12)
    assert np.any(subset_cdf < background_cdf - 1e-12)


def test_histograms_sum_to_one():
    store = [scored(str(i), "keyword text", 1 + i % 7) for i in range(50)]
    report = score_distribution(["keyword"], store, background_sample_size=20, seed=1)
    assert sum(report.subset_histogram.values()) == pytest.approx(1.0, abs=1e-9)
    assert sum(report.background_histogram.values()) == pytest.approx(1.0, abs=1e-9)


def test_no_keyword_match_raises_empty_subset():
    store = [scored("a", "hello", 4)]
    with pytest.raises(EmptySubset):
        score_distribution(["zebra"], store)


def test_empty_store_raises():
    with pytest.raises(EmptyData):
        score_distribution(["x"], [])


def test_subset_equal_population_matches_exact_histogram():
    rng = np.random.default_rng(9)
    displays = rng.integers(1, 8, size=400)
    store = [scored(str(i), "common token", int(d)) for i, d in enumerate(displays)]
    # oracle: exact full-population histogram
    exact = {d: float(np.mean(displays == d)) for d in range(1, 8)}
    report = score_distribution(
        ["common"], store, background_sample_size=len(store), seed=5
    )
    assert report.subset_histogram == pytest.approx(exact)
    # background sampled the whole population, so it matches exactly too
    assert report.background_histogram == pytest.approx(exact)


def test_keyword_match_is_case_insensitive():
    store = [scored("a", "Crisis UPDATE", 5), scored("b", "nothing", 2)]
    report = score_distribution(["crisis"], store, background_sample_size=2, seed=0)
    assert report.subset_n == 1


def test_background_sampling_deterministic():
    store = [scored(str(i), "tok", 1 + i % 7) for i in range(100)]
    a = score_distribution(["tok"], store, background_sample_size=30, seed=2)
    b = score_distribution(["tok"], store, background_sample_size=30, seed=2)
    assert a.background_histogram == b.background_histogram
