"""HTTP service: scoring, feedback, analytics, and fixture browsing.

All endpoints live under /v1 and speak JSON. Envelope errors use
{"code", "message"}; per-id failures inside a scores batch never fail the
batch. Every scores request appends one latency record, so the latency
store covers 100% of score traffic.
"""

from __future__ import annotations

import logging
import time
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..clock import Clock, SystemClock, format_timestamp, parse_timestamp
from ..errors import (
    EmptyData,
    EmptyFeedback,
    EmptySubset,
    NotFound,
    SourceUnavailable,
    ValidationError,
)
from ..scoring import DEFAULT_TTL_SECONDS, ModelArtifact, ScoreCache, score_tweet
from ..tweets import TweetSource, serialize_tweet
from . import analytics
from .stores import FeedbackEntry, LatencyRecord, ScoredTweetRecord, StoreSet

logger = logging.getLogger(__name__)

DEFAULT_BATCH_LIMIT = 100


class ScoresRequest(BaseModel):
    ids: list[str]


class FeedbackRequest(BaseModel):
    tweet_id: str
    client_token: str
    verdict: Literal["agree", "disagree"]
    system_score_at_time: int
    suggested_score: int | None = None
    received_at: str | None = None


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(
    artifact: ModelArtifact,
    source: TweetSource,
    stores: StoreSet,
    *,
    reputation=None,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
    batch_limit: int = DEFAULT_BATCH_LIMIT,
    clock: Clock | None = None,
    bootstrap_seed: int = 0,
    static_dir: str | None = None,
) -> FastAPI:
    clock = clock if clock is not None else SystemClock()
    cache = ScoreCache(ttl_seconds=ttl_seconds)
    started_mono = clock.monotonic()

    app = FastAPI(title="credscore", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _on_bad_shape(request: Request, exc: RequestValidationError):
        return _error(422, "validation_error", str(exc.errors()))

    def _score_one(tweet_id: str) -> dict:
        now = clock.now()

        def compute():
            tweet = source.get(tweet_id)
            score = score_tweet(artifact, tweet, reputation, now)
            stores.scores.append(
                ScoredTweetRecord(
                    tweet_id=tweet.id,
                    text=tweet.text,
                    raw=score.raw,
                    display=score.display,
                    computed_at=score.computed_at,
                ).to_record()
            )
            return score

        try:
            score, hit = cache.get_or_compute(tweet_id, compute, now)
        except NotFound as exc:
            return {"id": tweet_id, "error": {"code": "not_found", "message": str(exc)}}
        except SourceUnavailable as exc:
            return {
                "id": tweet_id,
                "error": {"code": "source_unavailable", "message": str(exc)},
            }
        return {
            "id": tweet_id,
            "display": score.display,
            "raw": score.raw,
            "computed_at": format_timestamp(score.computed_at),
            "cache_hit": hit,
        }

    @app.post("/v1/scores")
    def post_scores(body: ScoresRequest):
        if not body.ids:
            return _error(400, "bad_request", "ids must not be empty")
        if len(body.ids) > batch_limit:
            return _error(
                400, "bad_request", f"batch of {len(body.ids)} exceeds limit {batch_limit}"
            )
        t0 = time.perf_counter()
        results = [_score_one(tid) for tid in body.ids]
        elapsed_ms = (time.perf_counter() - t0) * 1000.0
        stores.latency.append(
            LatencyRecord(
                endpoint="/v1/scores",
                tweet_id=body.ids[0] if len(body.ids) == 1 else None,
                elapsed_ms=elapsed_ms,
                timestamp=clock.now(),
            ).to_record()
        )
        return {"results": results}

    @app.post("/v1/feedback")
    def post_feedback(body: FeedbackRequest):
        received = (
            parse_timestamp(body.received_at) if body.received_at else clock.now()
        )
        try:
            entry = FeedbackEntry(
                tweet_id=body.tweet_id,
                client_token=body.client_token,
                verdict=body.verdict,
                suggested_score=body.suggested_score,
                system_score_at_time=body.system_score_at_time,
                received_at=received,
            )
        except ValidationError as exc:
            return _error(422, "validation_error", str(exc))
        stored = stores.feedback.record(entry)
        return {"status": "recorded" if stored else "duplicate", "duplicate": not stored}

    @app.get("/v1/stats/feedback")
    def get_feedback_stats(seed: int = bootstrap_seed):
        try:
            summary = analytics.feedback_summary(stores.feedback.entries(), seed=seed)
        except EmptyFeedback as exc:
            return _error(422, "empty_feedback", str(exc))
        return summary.to_dict()

    @app.get("/v1/stats/latency")
    def get_latency_stats(quantiles: str = "0.5,0.8,0.9,0.99"):
        try:
            qs = [float(q) for q in quantiles.split(",") if q]
        except ValueError:
            return _error(400, "bad_request", f"bad quantiles {quantiles!r}")
        if any(not 0 <= q <= 1 for q in qs):
            return _error(400, "bad_request", "quantiles must lie in [0, 1]")
        try:
            report = analytics.latency_report(stores.latency_records(), quantiles=qs)
        except EmptyData as exc:
            return _error(422, "empty_data", str(exc))
        return report.to_dict()

    @app.get("/v1/stats/distribution")
    def get_distribution(keywords: str, sample_size: int = 1000, seed: int = 0):
        kws = [k.strip() for k in keywords.split(",") if k.strip()]
        if not kws:
            return _error(400, "bad_request", "keywords must not be empty")
        try:
            report = analytics.score_distribution(
                kws, stores.scored_tweets(), background_sample_size=sample_size, seed=seed
            )
        except EmptyData as exc:
            return _error(422, "empty_data", str(exc))
        except EmptySubset as exc:
            return _error(422, "empty_subset", str(exc))
        return report.to_dict()

    @app.get("/v1/stats/cache")
    def get_cache_stats():
        stats = cache.stats()
        return {"hits": stats.hits, "misses": stats.misses, "evictions": stats.evictions}

    @app.get("/v1/tweets")
    def get_tweets(offset: int = 0, limit: int = 20):
        if offset < 0 or limit < 1:
            return _error(400, "bad_request", "offset must be >= 0 and limit >= 1")
        lister = getattr(source, "list", None)
        if lister is None:
            return _error(400, "bad_request", "the configured source is not browsable")
        page = lister(offset=offset, limit=limit)
        return {
            "total": len(source) if hasattr(source, "__len__") else None,
            "offset": offset,
            "tweets": [serialize_tweet(t) for t in page],
        }

    @app.get("/v1/health")
    def get_health():
        return {
            "status": "ok",
            "model_version": artifact.version_string,
            "uptime_s": clock.monotonic() - started_mono,
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
