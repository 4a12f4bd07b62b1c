"""Graded ranking quality metrics.

For judgments g_1..g_m read off in ranked order, the discounted cumulative
gain at cutoff n is

    DCG@n = sum_{i=1..n} (2^{g_i} - 1) / log2(1 + i)

with 1-based positions. NDCG@n divides by the DCG of the gain-maximizing
permutation (grades sorted descending) and is defined as 1 when that ideal
DCG is 0, so an all-zero list is perfectly ranked by convention.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import InvalidCutoff


def _check_cutoff(n: int) -> None:
    if n < 1:
        raise InvalidCutoff(f"cutoff must be >= 1, got {n}")


def dcg_at_n(grades_in_ranked_order: Sequence[int], n: int) -> float:
    _check_cutoff(n)
    total = 0.0
    for i, grade in enumerate(grades_in_ranked_order[:n], start=1):
        total += (2.0**grade - 1.0) / np.log2(1.0 + i)
    return total


def ndcg_at_n(grades_in_ranked_order: Sequence[int], n: int) -> float:
    _check_cutoff(n)
    ideal = dcg_at_n(sorted(grades_in_ranked_order, reverse=True), n)
    if ideal == 0.0:
        return 1.0
    return dcg_at_n(grades_in_ranked_order, n) / ideal


def discount_vector(n: int) -> np.ndarray:
    """1 / log2(1 + i) for 1-based positions 1..n."""
    return 1.0 / np.log2(1.0 + np.arange(1, n + 1, dtype=np.float64))


def gains(grades: np.ndarray) -> np.ndarray:
    return np.exp2(grades.astype(np.float64)) - 1.0


def ndcg_of_scores(
    scores: np.ndarray,
    grades: np.ndarray,
    cutoff: int,
    ideal_dcg: float | None = None,
) -> float:
    """NDCG@cutoff of ranking `grades` by `scores` descending (stable ties).

    `ideal_dcg` can be precomputed by callers that evaluate many score
    vectors against the same judgments; pass the value of
    `ideal_dcg_at(grades, cutoff)`.
    """
    _check_cutoff(cutoff)
    k = min(cutoff, len(grades))
    order = np.argsort(-scores, kind="stable")[:k]
    disc = discount_vector(k)
    dcg = float(np.dot(gains(grades[order]), disc))
    if ideal_dcg is None:
        ideal_dcg = ideal_dcg_at(grades, cutoff)
    if ideal_dcg == 0.0:
        return 1.0
    return dcg / ideal_dcg


def ideal_dcg_at(grades: np.ndarray, cutoff: int) -> float:
    _check_cutoff(cutoff)
    k = min(cutoff, len(grades))
    top = np.sort(np.asarray(grades, dtype=np.float64))[::-1][:k]
    return float(np.dot(np.exp2(top) - 1.0, discount_vector(k)))
