"""HTTP service, append-only stores, and replayable analytics."""

from .analytics import (
    DistributionReport,
    FeedbackSummary,
    LatencyReport,
    feedback_summary,
    latency_report,
    score_distribution,
)
from .app import create_app
from .stores import (
    AppendOnlyStore,
    FeedbackEntry,
    FeedbackStore,
    LatencyRecord,
    ScoredTweetRecord,
    StoreSet,
)

__all__ = [
    "AppendOnlyStore",
    "DistributionReport",
    "FeedbackEntry",
    "FeedbackStore",
    "FeedbackSummary",
    "LatencyRecord",
    "LatencyReport",
    "ScoredTweetRecord",
    "StoreSet",
    "create_app",
    "feedback_summary",
    "latency_report",
    "score_distribution",
]
