from __future__ import annotations

import json
import math
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credscore.errors import InsufficientData, SchemaMismatch
from credscore.features import FeatureVector, extract_features, tokenize
from credscore.reputation import UrlReputation
from credscore.scaling import apply_scaler, fit_scaler
from credscore.schema import EXPECTED_GROUP_SIZES, SCHEMA
from credscore.tweets import AuthorRecord, TweetRecord

NOW = datetime(2014, 5, 1, tzinfo=timezone.utc)
GOLDEN_PATH = Path(__file__).parent / "data" / "feature_golden.json"

BOOLEAN_FEATURES = [
    "source_is_web", "source_is_mobile", "has_geo", "has_stock_symbol",
    "has_happy_emoticon", "has_sad_emoticon", "contains_via", "contains_colon",
    "is_verified", "has_location", "has_description", "has_profile_url",
    "is_reply", "is_retweet", "has_reputation_data",
]
COUNT_FEATURES = [
    "char_count", "word_count", "url_count", "hashtag_count", "unique_char_count",
    "exclamation_count", "question_mark_count", "swear_count",
    "negative_emotion_count", "positive_emotion_count", "pronoun_count",
    "self_word_count", "negation_count", "intensifier_count", "followers_count",
    "friends_count", "statuses_count", "listed_count", "retweet_count",
    "mention_count",
]


def make_tweet(text="hello", **overrides) -> TweetRecord:
    fields = dict(
        id="x",
        text=text,
        created_at=datetime(2013, 4, 15, 19, 0, tzinfo=timezone.utc),
        author=AuthorRecord(
            followers_count=100,
            friends_count=50,
            statuses_count=2000,
            created_at=datetime(2010, 1, 1, tzinfo=timezone.utc),
        ),
    )
    fields.update(overrides)
    return TweetRecord(**fields)


def test_schema_partition_sizes_sum_to_45():
    sizes = SCHEMA.group_sizes()
    assert sizes == EXPECTED_GROUP_SIZES
    assert sum(sizes.values()) == 45
    assert len(SCHEMA) == 45


def test_via_and_url_count():
    tweet = make_tweet("RT via @cnn: blast update http://a.b/c", urls=("http://a.b/c",))
    v = extract_features(tweet, None, NOW)
    assert v["contains_via"] == 1.0
    assert v["url_count"] == 1.0


def test_via_requires_word_boundary():
    v = extract_features(make_tweet("trivial viaduct"), None, NOW)
    assert v["contains_via"] == 0.0


def test_char_and_unique_counts():
    v = extract_features(make_tweet("aab"), None, NOW)
    assert v["char_count"] == 3.0
    assert v["unique_char_count"] == 2.0


def test_no_urls_means_absent_reputation():
    v = extract_features(make_tweet("plain text"), None, NOW)
    assert v["mean_wot_score"] == 0.0
    assert v["min_wot_score"] == 0.0
    assert v["has_reputation_data"] == 0.0


def test_reputation_aggregation():
    tweet = make_tweet("links", urls=("http://a", "http://b", "http://c"))
    table = {
        "http://a": UrlReputation(url="http://a", wot_score=90.0),
        "http://b": UrlReputation(url="http://b", wot_score=30.0),
        # http://c has no data
    }
    v = extract_features(tweet, table, NOW)
    assert v["mean_wot_score"] == 60.0
    assert v["min_wot_score"] == 30.0
    assert v["has_reputation_data"] == 1.0


def test_ratio_features_zero_denominators():
    tweet = make_tweet(
        "x",
        author=AuthorRecord(followers_count=0, friends_count=0, statuses_count=10, created_at=None),
    )
    v = extract_features(tweet, None, NOW)
    assert v["follower_friend_ratio"] == 0.0
    assert v["statuses_follower_ratio"] == 0.0
    assert v["statuses_per_day"] == 0.0  # unknown account age
    assert v["account_age_days"] == 0.0


def test_empty_text_ratios():
    v = extract_features(make_tweet(""), None, NOW)
    assert v["uppercase_ratio"] == 0.0
    assert v["digit_ratio"] == 0.0
    assert v["char_count"] == 0.0


def test_lexicon_counts():
    v = extract_features(make_tweet("I really never trust my damn feed"), None, NOW)
    assert v["self_word_count"] == 2.0  # I, my
    assert v["negation_count"] == 1.0  # never
    assert v["intensifier_count"] == 1.0  # really
    assert v["swear_count"] == 1.0  # damn


def test_tokenize_keeps_apostrophes():
    assert tokenize("Don't PANIC, it's fine") == ["don't", "panic", "it's", "fine"]


def test_monotone_clock_changes_only_age_features():
    tweet = make_tweet("steady text", urls=("http://a",))
    table = {"http://a": UrlReputation(url="http://a", wot_score=50.0)}
    v1 = extract_features(tweet, table, NOW)
    v2 = extract_features(tweet, table, NOW + timedelta(hours=5))
    changed = {
        name
        for name, a, b in zip(SCHEMA.names, v1.values, v2.values)
        if a != b
    }
    assert changed == {"age_seconds", "account_age_days", "statuses_per_day"} or changed == {
        "age_seconds",
        "account_age_days",
    }


def test_boolean_features_are_zero_or_one(fixture_tweets, reputation_lookup):
    for tweet in fixture_tweets:
        v = extract_features(tweet, reputation_lookup, NOW)
        for name in BOOLEAN_FEATURES:
            assert v[name] in (0.0, 1.0), (tweet.id, name, v[name])
        for name in COUNT_FEATURES:
            value = v[name]
            assert value >= 0 and value == int(value), (tweet.id, name, value)


def test_determinism_bit_for_bit(fixture_tweets, reputation_lookup):
    for tweet in fixture_tweets[:5]:
        a = extract_features(tweet, reputation_lookup, NOW)
        b = extract_features(tweet, reputation_lookup, NOW)
        assert a == b


def test_golden_vectors_byte_identical(fixture_tweets, reputation_lookup):
    """Acceptance-level golden test: 24 fixture tweets, frozen 45-dim vectors."""
    golden = json.loads(GOLDEN_PATH.read_text("utf-8"))
    assert golden["schema_version"] == SCHEMA.version
    vectors = {
        t.id: list(extract_features(t, reputation_lookup, NOW).values)
        for t in fixture_tweets
    }
    regenerated = json.dumps(
        {"now": golden["now"], "schema_version": SCHEMA.version, "vectors": vectors},
        indent=2,
        sort_keys=True,
    ) + "\n"
    assert regenerated == GOLDEN_PATH.read_text("utf-8")
    assert len(vectors) >= 20
    assert all(len(v) == 45 for v in vectors.values())


def test_vector_length_enforced():
    with pytest.raises(ValueError):
        FeatureVector(values=(1.0, 2.0), schema_version=SCHEMA.version)
    with pytest.raises(ValueError):
        FeatureVector(values=tuple([math.inf] + [0.0] * 44), schema_version=SCHEMA.version)


# --- scaling ---


def _vec(values) -> FeatureVector:
    return FeatureVector(values=tuple(values), schema_version=SCHEMA.version)


def test_fit_scaler_min_max():
    rows = [_vec([0.0] * 45), _vec([10.0] * 45)]
    scaler = fit_scaler(rows)
    assert scaler.mins[0] == 0.0
    assert scaler.maxs[0] == 10.0


def test_fit_scaler_constant_feature():
    rows = [_vec([5.0] * 45)] * 3
    scaler = fit_scaler(rows)
    assert scaler.mins[7] == scaler.maxs[7] == 5.0
    scaled = apply_scaler(rows[0], scaler)
    assert scaled.values[7] == 0.0


def test_fit_scaler_needs_two_rows():
    with pytest.raises(InsufficientData):
        fit_scaler([_vec([0.0] * 45)])


def test_apply_scaler_endpoints_and_midpoint():
    rows = [_vec([0.0] * 45), _vec([10.0] * 45)]
    scaler = fit_scaler(rows)
    assert apply_scaler(_vec([0.0] * 45), scaler).values[0] == 0.0
    assert apply_scaler(_vec([10.0] * 45), scaler).values[0] == 1.0
    assert apply_scaler(_vec([5.0] * 45), scaler).values[0] == 0.5
    assert apply_scaler(_vec([15.0] * 45), scaler).values[0] == 1.0  # clamp
    assert apply_scaler(_vec([-3.0] * 45), scaler).values[0] == 0.0  # clamp


def test_apply_scaler_schema_mismatch():
    rows = [_vec([0.0] * 45), _vec([1.0] * 45)]
    scaler = fit_scaler(rows)
    alien = FeatureVector(values=tuple([0.0] * 45), schema_version="fs0-deadbeef")
    with pytest.raises(SchemaMismatch):
        apply_scaler(alien, scaler)


@given(st.lists(st.floats(min_value=-100, max_value=100), min_size=2, max_size=30))
@settings(max_examples=50)
def test_scaled_fit_matrix_lands_in_unit_interval(values):
    rows = [_vec([x] * 45) for x in values]
    scaler = fit_scaler(rows)
    for row in rows:
        scaled = apply_scaler(row, scaler)
        assert all(0.0 <= v <= 1.0 for v in scaled.values)
