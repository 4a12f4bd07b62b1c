"""Replayable analytics over the service stores.

Feedback percentages follow the published table layout: every statistic is
a percentage of all classified entries, so agreed and disagreed sum to 100
and the disagreement-magnitude rows sum to the disagreement share.
Confidence intervals are 95% seeded-bootstrap percentile intervals
(multinomial resampling of the entry categories, 10,000 resamples by
default), which makes every interval deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyData, EmptyFeedback, EmptySubset
from .stores import FeedbackEntry, ScoredTweetRecord

BOOTSTRAP_RESAMPLES = 10_000
MAX_MAGNITUDE = 6
DISPLAY_VALUES = tuple(range(1, 8))


@dataclass(frozen=True)
class PctWithCI:
    value: float
    ci_low: float
    ci_high: float

    def contains_point(self) -> bool:
        return self.ci_low <= self.value <= self.ci_high


@dataclass
class FeedbackSummary:
    n: int
    n_agreed: int
    n_disagreed: int
    pct_agreed: PctWithCI
    pct_disagreed: PctWithCI
    pct_should_be_higher: PctWithCI
    pct_should_be_lower: PctWithCI
    magnitude_histogram: dict[int, PctWithCI]  # |suggested - system| in 1..6
    resamples: int
    seed: int

    def to_dict(self) -> dict:
        def pct(p: PctWithCI) -> dict:
            return {"value": p.value, "ci_low": p.ci_low, "ci_high": p.ci_high}

        return {
            "n": self.n,
            "n_agreed": self.n_agreed,
            "n_disagreed": self.n_disagreed,
            "pct_agreed": pct(self.pct_agreed),
            "pct_disagreed": pct(self.pct_disagreed),
            "pct_should_be_higher": pct(self.pct_should_be_higher),
            "pct_should_be_lower": pct(self.pct_should_be_lower),
            "magnitude_histogram": {
                str(m): pct(p) for m, p in self.magnitude_histogram.items()
            },
            "bootstrap": {"resamples": self.resamples, "seed": self.seed},
        }


def _entry_delta(entry: FeedbackEntry) -> int | None:
    if entry.verdict == "agree":
        return None
    assert entry.suggested_score is not None
    return entry.suggested_score - entry.system_score_at_time


def feedback_summary(
    entries: Sequence[FeedbackEntry],
    seed: int = 0,
    resamples: int = BOOTSTRAP_RESAMPLES,
) -> FeedbackSummary:
    n = len(entries)
    if n == 0:
        raise EmptyFeedback("no feedback entries recorded")

    # category per entry: None = agree, otherwise the signed score delta
    deltas = [_entry_delta(e) for e in entries]
    categories = sorted({d for d in deltas}, key=lambda d: (d is not None, d))
    cat_index = {c: i for i, c in enumerate(categories)}
    counts = np.zeros(len(categories), dtype=np.int64)
    for d in deltas:
        counts[cat_index[d]] += 1

    rng = np.random.default_rng(seed)
    boot_counts = rng.multinomial(n, counts / n, size=resamples)

    def stat(mask: np.ndarray) -> PctWithCI:
        point = 100.0 * counts[mask].sum() / n
        boot = 100.0 * boot_counts[:, mask].sum(axis=1) / n
        low, high = np.percentile(boot, [2.5, 97.5])
        return PctWithCI(value=float(point), ci_low=float(low), ci_high=float(high))

    cats = np.asarray([(-99 if c is None else c) for c in categories])
    agree_mask = cats == -99
    disagree_mask = ~agree_mask
    higher_mask = disagree_mask & (cats > 0)
    lower_mask = disagree_mask & (cats < 0) & (cats != -99)

    magnitude = {}
    for m in range(1, MAX_MAGNITUDE + 1):
        magnitude[m] = stat(disagree_mask & (np.abs(cats) == m))

    return FeedbackSummary(
        n=n,
        n_agreed=int(counts[agree_mask].sum()),
        n_disagreed=int(counts[disagree_mask].sum()),
        pct_agreed=stat(agree_mask),
        pct_disagreed=stat(disagree_mask),
        pct_should_be_higher=stat(higher_mask),
        pct_should_be_lower=stat(lower_mask),
        magnitude_histogram=magnitude,
        resamples=resamples,
        seed=seed,
    )


@dataclass
class LatencyReport:
    n: int
    quantiles: dict[float, float]  # q -> milliseconds
    cdf: list[tuple[float, float]]  # (milliseconds, fraction of requests <= it)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "quantiles_ms": {str(q): v for q, v in self.quantiles.items()},
            "cdf": [{"ms": ms, "fraction": f} for ms, f in self.cdf],
        }

    def to_text(self) -> str:
        lines = [f"n = {self.n}"]
        for q in sorted(self.quantiles):
            lines.append(f"p{int(q * 100):<3d} {self.quantiles[q]:10.2f} ms")
        return "\n".join(lines)


def latency_report(
    elapsed_ms: Sequence[float],
    quantiles: Sequence[float] = (0.5, 0.8, 0.9, 0.99),
) -> LatencyReport:
    """Empirical CDF plus linearly interpolated quantile estimates."""
    values = np.asarray(
        [e.elapsed_ms if hasattr(e, "elapsed_ms") else float(e) for e in elapsed_ms],
        dtype=np.float64,
    )
    if len(values) == 0:
        raise EmptyData("no latency records")
    qs = {float(q): float(np.quantile(values, q, method="linear")) for q in quantiles}
    unique, cum = np.unique(values, return_counts=True)
    fractions = np.cumsum(cum) / len(values)
    cdf = list(zip(unique.tolist(), fractions.tolist()))
    return LatencyReport(n=len(values), quantiles=qs, cdf=cdf)


@dataclass
class DistributionReport:
    keywords: list[str]
    subset_n: int
    background_n: int
    background_sample_size: int
    seed: int
    subset_histogram: dict[int, float]  # display value -> mass, sums to 1
    background_histogram: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "keywords": self.keywords,
            "subset_n": self.subset_n,
            "background_n": self.background_n,
            "background_sample_size": self.background_sample_size,
            "seed": self.seed,
            "subset_histogram": {str(k): v for k, v in self.subset_histogram.items()},
            "background_histogram": {str(k): v for k, v in self.background_histogram.items()},
        }


def _display_histogram(scores: Sequence[ScoredTweetRecord]) -> dict[int, float]:
    counts = np.zeros(len(DISPLAY_VALUES))
    for s in scores:
        counts[s.display - 1] += 1
    return {d: float(c / len(scores)) for d, c in zip(DISPLAY_VALUES, counts)}


def score_distribution(
    keywords: Sequence[str],
    scored: Sequence[ScoredTweetRecord],
    background_sample_size: int = 1000,
    seed: int = 0,
) -> DistributionReport:
    """Keyword-filtered score distribution against a seeded background sample."""
    if not scored:
        raise EmptyData("no scored tweets in the store")
    lowered = [k.lower() for k in keywords if k]
    subset = [s for s in scored if any(k in s.text.lower() for k in lowered)]
    if not subset:
        raise EmptySubset(f"no scored tweets match keywords {list(keywords)!r}")
    rng = np.random.default_rng(seed)
    sample_n = min(background_sample_size, len(scored))
    idx = rng.choice(len(scored), size=sample_n, replace=False)
    background = [scored[i] for i in idx]
    return DistributionReport(
        keywords=list(keywords),
        subset_n=len(subset),
        background_n=len(background),
        background_sample_size=background_sample_size,
        seed=seed,
        subset_histogram=_display_histogram(subset),
        background_histogram=_display_histogram(background),
    )
