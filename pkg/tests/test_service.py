from __future__ import annotations

from datetime import datetime, timezone

import pytest
from fastapi.testclient import TestClient

from credscore.clock import ManualClock, parse_timestamp
from credscore.errors import SourceUnavailable
from credscore.scoring import score_tweet
from credscore.service.app import create_app
from credscore.service.stores import StoreSet

NOW = datetime(2014, 5, 1, tzinfo=timezone.utc)


class FlakySource:
    """Delegates to a fixture source but fails specific ids on demand."""

    def __init__(self, inner, unavailable=()):
        self.inner = inner
        self.unavailable = set(unavailable)

    def __len__(self):
        return len(self.inner)

    def list(self, offset=0, limit=20):
        return self.inner.list(offset=offset, limit=limit)

    def get(self, tweet_id):
        if tweet_id in self.unavailable:
            raise SourceUnavailable(f"upstream flaked for {tweet_id}")
        return self.inner.get(tweet_id)


@pytest.fixture()
def service(tmp_path, trained_artifact, fixture_source, reputation_lookup):
    clock = ManualClock(start=NOW)
    stores = StoreSet(tmp_path / "stores")
    app = create_app(
        trained_artifact,
        FlakySource(fixture_source),
        stores,
        reputation=reputation_lookup,
        ttl_seconds=900,
        batch_limit=100,
        clock=clock,
    )
    client = TestClient(app)
    return client, clock, stores


def test_health(service):
    client, clock, _ = service
    first = client.get("/v1/health").json()
    assert first["status"] == "ok"
    assert first["model_version"].startswith("svmrank/")
    clock.advance(5)
    second = client.get("/v1/health").json()
    assert second["uptime_s"] > first["uptime_s"]


def test_single_known_id(service):
    client, _, _ = service
    resp = client.post("/v1/scores", json={"ids": ["t001"]})
    assert resp.status_code == 200
    (result,) = resp.json()["results"]
    assert result["id"] == "t001"
    assert 1 <= result["display"] <= 7
    assert result["cache_hit"] is False


def test_partial_failure_never_fails_batch(service):
    client, _, _ = service
    resp = client.post("/v1/scores", json={"ids": ["t001", "no-such-id", "t002"]})
    assert resp.status_code == 200
    results = resp.json()["results"]
    assert "display" in results[0]
    assert results[1]["error"]["code"] == "not_found"
    assert "display" in results[2]


def test_source_unavailable_error_code(
    tmp_path, trained_artifact, fixture_source, reputation_lookup
):
    app = create_app(
        trained_artifact,
        FlakySource(fixture_source, unavailable={"t003"}),
        StoreSet(tmp_path / "stores"),
        reputation=reputation_lookup,
        clock=ManualClock(start=NOW),
    )
    client = TestClient(app)
    resp = client.post("/v1/scores", json={"ids": ["t003", "t004"]})
    results = resp.json()["results"]
    assert results[0]["error"]["code"] == "source_unavailable"
    assert "display" in results[1]


def test_batch_limit_and_empty_batch(service):
    client, _, _ = service
    too_many = [f"id{i}" for i in range(101)]
    assert client.post("/v1/scores", json={"ids": too_many}).status_code == 400
    resp = client.post("/v1/scores", json={"ids": []})
    assert resp.status_code == 400
    assert resp.json()["code"] == "bad_request"


def test_cache_ttl_through_service(service):
    client, clock, _ = service
    first = client.post("/v1/scores", json={"ids": ["t001"]}).json()["results"][0]
    clock.advance(899)
    warm = client.post("/v1/scores", json={"ids": ["t001"]}).json()["results"][0]
    assert warm["cache_hit"] is True
    assert warm["computed_at"] == first["computed_at"]
    clock.advance(2)
    cold = client.post("/v1/scores", json={"ids": ["t001"]}).json()["results"][0]
    assert cold["cache_hit"] is False
    assert parse_timestamp(cold["computed_at"]) > parse_timestamp(first["computed_at"])


def test_display_round_trips_through_scoring_module(
    service, trained_artifact, fixture_source, reputation_lookup
):
    client, clock, _ = service
    resp = client.post("/v1/scores", json={"ids": ["t007"]}).json()["results"][0]
    direct = score_tweet(
        trained_artifact, fixture_source.get("t007"), reputation_lookup, clock.now()
    )
    assert resp["display"] == direct.display
    assert resp["raw"] == pytest.approx(direct.raw, rel=1e-12)


def test_latency_instrumentation_covers_every_request(service):
    client, _, stores = service
    n_before = stores.latency.count()
    for ids in (["t001"], ["t002", "t003"], ["t001"]):
        client.post("/v1/scores", json={"ids": ids})
    assert stores.latency.count() == n_before + 3


def test_feedback_flow_and_idempotency(service):
    client, _, _ = service
    body = {
        "tweet_id": "t001",
        "client_token": "browser-1",
        "verdict": "disagree",
        "suggested_score": 7,
        "system_score_at_time": 4,
        "received_at": "2014-05-01T10:00:00Z",
    }
    first = client.post("/v1/feedback", json=body)
    assert first.status_code == 200
    assert first.json() == {"status": "recorded", "duplicate": False}
    second = client.post("/v1/feedback", json=body)
    assert second.json() == {"status": "duplicate", "duplicate": True}

    stats = client.get("/v1/stats/feedback").json()
    assert stats["n"] == 1
    assert stats["pct_disagreed"]["value"] == 100.0
    assert stats["magnitude_histogram"]["3"]["value"] == 100.0


def test_feedback_validation_errors(service):
    client, _, _ = service
    missing_suggestion = {
        "tweet_id": "t001",
        "client_token": "c",
        "verdict": "disagree",
        "system_score_at_time": 4,
    }
    resp = client.post("/v1/feedback", json=missing_suggestion)
    assert resp.status_code == 422
    assert resp.json()["code"] == "validation_error"
    out_of_range = {
        "tweet_id": "t001",
        "client_token": "c",
        "verdict": "disagree",
        "suggested_score": 9,
        "system_score_at_time": 4,
    }
    assert client.post("/v1/feedback", json=out_of_range).status_code == 422


def test_feedback_agree_stores_without_suggestion(service):
    client, _, stores = service
    body = {
        "tweet_id": "t005",
        "client_token": "c2",
        "verdict": "agree",
        "system_score_at_time": 5,
        "received_at": "2014-05-01T11:00:00Z",
    }
    assert client.post("/v1/feedback", json=body).status_code == 200
    (entry,) = stores.feedback.entries()
    assert entry.verdict == "agree"
    assert entry.suggested_score is None


def test_latency_stats_endpoint(service):
    client, _, _ = service
    assert client.get("/v1/stats/latency").status_code == 422  # empty store
    client.post("/v1/scores", json={"ids": ["t001"]})
    stats = client.get("/v1/stats/latency", params={"quantiles": "0.5,0.99"}).json()
    assert stats["n"] == 1
    assert set(stats["quantiles_ms"]) == {"0.5", "0.99"}
    fractions = [p["fraction"] for p in stats["cdf"]]
    assert fractions[-1] == 1.0


def test_distribution_endpoint(service):
    client, _, _ = service
    client.post("/v1/scores", json={"ids": [f"t{i:03d}" for i in range(1, 25)]})
    resp = client.get("/v1/stats/distribution", params={"keywords": "typhoon,storm"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["subset_n"] >= 1
    assert sum(body["subset_histogram"].values()) == pytest.approx(1.0, abs=1e-9)
    assert client.get(
        "/v1/stats/distribution", params={"keywords": "zzzznothing"}
    ).status_code == 422


def test_tweets_browse_pagination(service):
    client, _, _ = service
    page = client.get("/v1/tweets", params={"offset": 0, "limit": 20}).json()
    assert page["total"] == 24
    assert len(page["tweets"]) == 20
    assert page["tweets"][0]["id"] == "t001"
    rest = client.get("/v1/tweets", params={"offset": 20, "limit": 20}).json()
    assert len(rest["tweets"]) == 4


def test_cache_stats_endpoint(service):
    client, _, _ = service
    client.post("/v1/scores", json={"ids": ["t001"]})
    client.post("/v1/scores", json={"ids": ["t001"]})
    stats = client.get("/v1/stats/cache").json()
    assert stats["hits"] == 1
    assert stats["misses"] == 1


def test_replaying_feedback_store_reproduces_summary(service, tmp_path):
    client, _, stores = service
    for i, verdict in enumerate(["agree", "disagree", "agree"]):
        body = {
            "tweet_id": f"t00{i + 1}",
            "client_token": "c",
            "verdict": verdict,
            "system_score_at_time": 4,
            "received_at": f"2014-05-01T0{i}:00:00Z",
        }
        if verdict == "disagree":
            body["suggested_score"] = 6
        client.post("/v1/feedback", json=body)
    via_endpoint = client.get("/v1/stats/feedback").json()

    from credscore.service.analytics import feedback_summary
    from credscore.service.stores import FeedbackStore

    replayed = FeedbackStore(stores.feedback._store.path)
    recomputed = feedback_summary(replayed.entries(), seed=0).to_dict()
    assert recomputed == via_endpoint
