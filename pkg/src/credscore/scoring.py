"""From raw model output to the 1-7 display score, plus the serving pieces.

The display mapping is equal-mass septile binning: six thresholds at the
1/7..6/7 quantiles of the raw scores the model produced on its own training
set. A raw score's display value is one plus the number of thresholds
strictly below it, so values exactly on a threshold fall in the lower
bucket and the mapping is monotone by construction.

Served scores are cached with a TTL (default 900 s) against an injected
clock; entries at or past the TTL are recomputed, never returned.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .errors import (
    InsufficientData,
    SchemaHashMismatch,
    SchemaMismatch,
    UnsupportedVersion,
)
from .features import FeatureVector, ReputationLookup, extract_features
from .ranking.model import LinearModel
from .scaling import ScalerParams, apply_scaler
from .schema import SCHEMA
from .tweets import TweetRecord

DEFAULT_TTL_SECONDS = 900.0  # 15 minutes
ARTIFACT_FORMAT_VERSION = 1
N_BINS = 7


@dataclass(frozen=True)
class ScoreBins:
    thresholds: tuple[float, ...]  # t1..t6, non-decreasing

    def __post_init__(self):
        if len(self.thresholds) != N_BINS - 1:
            raise ValueError(f"expected {N_BINS - 1} thresholds, got {len(self.thresholds)}")
        if any(a > b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must be non-decreasing")


def fit_bins(raw_scores) -> ScoreBins:
    scores = np.asarray(raw_scores, dtype=np.float64)
    if len(scores) < N_BINS:
        raise InsufficientData(f"need >= {N_BINS} raw scores to fit bins, got {len(scores)}")
    qs = np.arange(1, N_BINS) / N_BINS
    return ScoreBins(thresholds=tuple(np.quantile(scores, qs, method="linear").tolist()))


def to_display(raw: float, bins: ScoreBins) -> int:
    """1 + number of thresholds strictly below `raw`; result is in 1..7."""
    return 1 + int(np.searchsorted(bins.thresholds, raw, side="left"))


@dataclass(frozen=True)
class CredibilityScore:
    tweet_id: str
    raw: float
    display: int
    computed_at: datetime
    model_version: str

    def __post_init__(self):
        if not 1 <= self.display <= 7:
            raise ValueError(f"display must be in 1..7, got {self.display}")


@dataclass
class ModelArtifact:
    model: LinearModel
    scaler: ScalerParams
    bins: ScoreBins
    schema_version: str
    format_version: int = ARTIFACT_FORMAT_VERSION

    def __post_init__(self):
        for found, what in (
            (self.model.schema_version, "model"),
            (self.scaler.schema_version, "scaler"),
        ):
            if found is not None and found != self.schema_version:
                raise SchemaHashMismatch(
                    f"{what} schema {found!r} != artifact schema {self.schema_version!r}"
                )

    @property
    def version_string(self) -> str:
        return f"{self.model.trainer_tag}/{self.schema_version}"


def save_model(artifact: ModelArtifact, path: Path | str) -> None:
    doc = {
        "format_version": artifact.format_version,
        "schema_version": artifact.schema_version,
        "model": {
            "weights": artifact.model.weights.tolist(),
            "trainer_tag": artifact.model.trainer_tag,
            "metadata": artifact.model.metadata,
        },
        "scaler": {"mins": list(artifact.scaler.mins), "maxs": list(artifact.scaler.maxs)},
        "bins": list(artifact.bins.thresholds),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path: Path | str, expected_schema: str | None = None) -> ModelArtifact:
    """Load and validate an artifact; never yields a silent partial model.

    `expected_schema` defaults to the schema compiled into this build; an
    artifact produced under any other schema is rejected.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UnsupportedVersion(f"{path} is not a valid artifact: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise UnsupportedVersion(f"{path} lacks a format_version")
    if doc["format_version"] != ARTIFACT_FORMAT_VERSION:
        raise UnsupportedVersion(
            f"artifact format {doc['format_version']!r} unsupported "
            f"(expected {ARTIFACT_FORMAT_VERSION})"
        )
    expected = expected_schema if expected_schema is not None else SCHEMA.version
    if doc.get("schema_version") != expected:
        raise SchemaHashMismatch(
            f"artifact schema {doc.get('schema_version')!r} != current schema {expected!r}"
        )
    try:
        model = LinearModel(
            weights=np.asarray(doc["model"]["weights"], dtype=np.float64),
            schema_version=doc["schema_version"],
            trainer_tag=doc["model"]["trainer_tag"],
            metadata=doc["model"].get("metadata", {}),
        )
        scaler = ScalerParams(
            mins=tuple(doc["scaler"]["mins"]),
            maxs=tuple(doc["scaler"]["maxs"]),
            schema_version=doc["schema_version"],
        )
        bins = ScoreBins(thresholds=tuple(doc["bins"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise UnsupportedVersion(f"{path} has a malformed body: {exc}") from exc
    return ModelArtifact(
        model=model,
        scaler=scaler,
        bins=bins,
        schema_version=doc["schema_version"],
        format_version=doc["format_version"],
    )


def score_tweet(
    artifact: ModelArtifact,
    tweet: TweetRecord,
    reputation: ReputationLookup | Mapping | None,
    now: datetime,
) -> CredibilityScore:
    """extract -> scale -> dot product -> display bucket."""
    vector = extract_features(tweet, reputation, now)
    if vector.schema_version != artifact.schema_version:
        raise SchemaMismatch(
            f"extracted schema {vector.schema_version!r} != artifact "
            f"schema {artifact.schema_version!r}"
        )
    scaled = apply_scaler(vector, artifact.scaler)
    raw = float(np.dot(scaled.as_array(), artifact.model.weights))
    return CredibilityScore(
        tweet_id=tweet.id,
        raw=raw,
        display=to_display(raw, artifact.bins),
        computed_at=now,
        model_version=artifact.version_string,
    )


def score_vector(artifact: ModelArtifact, vector: FeatureVector) -> float:
    """Raw score of an already-extracted (unscaled) vector."""
    scaled = apply_scaler(vector, artifact.scaler)
    return float(np.dot(scaled.as_array(), artifact.model.weights))


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0
    evictions: int = 0


class ScoreCache:
    """TTL cache for served scores; safe for concurrent readers and writers.

    Concurrent misses for the same id may both compute (last write wins);
    compute errors propagate and are never cached.
    """

    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS):
        if ttl_seconds <= 0:
            raise ValueError(f"ttl must be > 0, got {ttl_seconds}")
        self.ttl_seconds = ttl_seconds
        self._entries: dict[str, tuple[CredibilityScore, datetime]] = {}
        self._lock = threading.Lock()
        self._stats = CacheStats()

    def __len__(self) -> int:
        return len(self._entries)

    def stats(self) -> CacheStats:
        with self._lock:
            return CacheStats(
                hits=self._stats.hits,
                misses=self._stats.misses,
                evictions=self._stats.evictions,
            )

    def get_or_compute(
        self,
        tweet_id: str,
        compute: Callable[[], CredibilityScore],
        now: datetime,
    ) -> tuple[CredibilityScore, bool]:
        """Return (score, cache_hit). Entries aged >= ttl are recomputed."""
        with self._lock:
            entry = self._entries.get(tweet_id)
            if entry is not None:
                score, stored_at = entry
                if (now - stored_at).total_seconds() < self.ttl_seconds:
                    self._stats.hits += 1
                    return score, True
            self._stats.misses += 1
            if entry is not None:
                self._stats.evictions += 1

        # compute outside the lock: upstream fetches must not serialize the cache
        score = compute()
        with self._lock:
            self._entries[tweet_id] = (score, now)
        return score, False
