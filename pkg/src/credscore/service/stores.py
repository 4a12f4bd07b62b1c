"""Append-only line-delimited stores for scores, feedback, and latency.

One JSON object per line; a single locked appender per file serializes
writes, and reads replay the whole file, so any summary can be reproduced
exactly from the stored lines.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from ..clock import format_timestamp, parse_timestamp
from ..errors import ValidationError

SCORES_FILE = "scores.jsonl"
FEEDBACK_FILE = "feedback.jsonl"
LATENCY_FILE = "latency.jsonl"


class AppendOnlyStore:
    def __init__(self, path: Path | str):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, separators=(",", ":"))
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()

    def replay(self) -> list[dict]:
        if not self.path.exists():
            return []
        with self._lock:
            text = self.path.read_text("utf-8")
        return [json.loads(line) for line in text.splitlines() if line.strip()]

    def count(self) -> int:
        return len(self.replay())


@dataclass(frozen=True)
class FeedbackEntry:
    tweet_id: str
    client_token: str
    verdict: str  # "agree" | "disagree"
    system_score_at_time: int
    received_at: datetime
    suggested_score: int | None = None

    def __post_init__(self):
        if self.verdict not in ("agree", "disagree"):
            raise ValidationError(f"verdict must be agree or disagree, got {self.verdict!r}")
        if not 1 <= self.system_score_at_time <= 7:
            raise ValidationError(
                f"system_score_at_time must be in 1..7, got {self.system_score_at_time}"
            )
        if self.verdict == "disagree":
            if self.suggested_score is None:
                raise ValidationError("disagree requires a suggested_score")
            if not 1 <= self.suggested_score <= 7:
                raise ValidationError(
                    f"suggested_score must be in 1..7, got {self.suggested_score}"
                )
        elif self.suggested_score is not None:
            raise ValidationError("agree must not carry a suggested_score")

    @property
    def dedup_key(self) -> tuple[str, str, str]:
        return (self.client_token, self.tweet_id, format_timestamp(self.received_at))

    def to_record(self) -> dict:
        return {
            "tweet_id": self.tweet_id,
            "client_token": self.client_token,
            "verdict": self.verdict,
            "suggested_score": self.suggested_score,
            "system_score_at_time": self.system_score_at_time,
            "received_at": format_timestamp(self.received_at),
        }

    @classmethod
    def from_record(cls, record: dict) -> "FeedbackEntry":
        return cls(
            tweet_id=record["tweet_id"],
            client_token=record["client_token"],
            verdict=record["verdict"],
            suggested_score=record.get("suggested_score"),
            system_score_at_time=record["system_score_at_time"],
            received_at=parse_timestamp(record["received_at"]),
        )


class FeedbackStore:
    """Append-only feedback log, idempotent per (client_token, tweet_id, received_at)."""

    def __init__(self, path: Path | str):
        self._store = AppendOnlyStore(path)
        self._lock = threading.Lock()
        self._seen: set[tuple[str, str, str]] = {
            FeedbackEntry.from_record(r).dedup_key for r in self._store.replay()
        }

    def record(self, entry: FeedbackEntry) -> bool:
        """Append `entry`; returns False when the triple was already stored."""
        with self._lock:
            if entry.dedup_key in self._seen:
                return False
            self._seen.add(entry.dedup_key)
        self._store.append(entry.to_record())
        return True

    def entries(self) -> list[FeedbackEntry]:
        return [FeedbackEntry.from_record(r) for r in self._store.replay()]

    def __len__(self) -> int:
        return len(self._seen)


@dataclass(frozen=True)
class LatencyRecord:
    endpoint: str
    elapsed_ms: float
    timestamp: datetime
    tweet_id: str | None = None

    def __post_init__(self):
        if self.elapsed_ms < 0:
            raise ValidationError(f"elapsed_ms must be >= 0, got {self.elapsed_ms}")

    def to_record(self) -> dict:
        return {
            "endpoint": self.endpoint,
            "tweet_id": self.tweet_id,
            "elapsed_ms": self.elapsed_ms,
            "timestamp": format_timestamp(self.timestamp),
        }

    @classmethod
    def from_record(cls, record: dict) -> "LatencyRecord":
        return cls(
            endpoint=record["endpoint"],
            tweet_id=record.get("tweet_id"),
            elapsed_ms=record["elapsed_ms"],
            timestamp=parse_timestamp(record["timestamp"]),
        )


@dataclass(frozen=True)
class ScoredTweetRecord:
    """One computed score plus the text it was computed for (for keyword filters)."""

    tweet_id: str
    text: str
    raw: float
    display: int
    computed_at: datetime

    def to_record(self) -> dict:
        return {
            "tweet_id": self.tweet_id,
            "text": self.text,
            "raw": self.raw,
            "display": self.display,
            "computed_at": format_timestamp(self.computed_at),
        }

    @classmethod
    def from_record(cls, record: dict) -> "ScoredTweetRecord":
        return cls(
            tweet_id=record["tweet_id"],
            text=record["text"],
            raw=record["raw"],
            display=record["display"],
            computed_at=parse_timestamp(record["computed_at"]),
        )


class StoreSet:
    """The three per-service stores rooted in one directory."""

    def __init__(self, root: Path | str):
        root = Path(root)
        self.scores = AppendOnlyStore(root / SCORES_FILE)
        self.feedback = FeedbackStore(root / FEEDBACK_FILE)
        self.latency = AppendOnlyStore(root / LATENCY_FILE)

    def scored_tweets(self) -> list[ScoredTweetRecord]:
        return [ScoredTweetRecord.from_record(r) for r in self.scores.replay()]

    def latency_records(self) -> list[LatencyRecord]:
        return [LatencyRecord.from_record(r) for r in self.latency.replay()]
