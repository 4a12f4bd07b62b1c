"""Turns one TweetRecord into the fixed 45-slot feature vector.

Extraction is pure: the same (tweet, reputation snapshot, now) always
yields the identical vector. Missing data never raises; it produces a zero
plus the relevant presence indicator staying at zero. Ratio features with a
zero denominator are 0.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Mapping

import numpy as np

from .lexicons import Lexicon, load_lexicons
from .reputation import UrlReputation
from .schema import SCHEMA, FeatureSchema, check_schema_version
from .tweets import TweetRecord

ReputationLookup = Callable[[str], UrlReputation]

HAPPY_EMOTICONS = (":)", ":-)", ":D", "=)")
SAD_EMOTICONS = (":(", ":-(", ";(")
MOBILE_SOURCE_MARKERS = ("iphone", "android", "mobile", "ipad", "blackberry")
WEB_SOURCE_MARKERS = ("web", "twitter web")

_VIA_RE = re.compile(r"\bvia\b", re.IGNORECASE)
_TOKEN_RE = re.compile(r"[a-z']+")


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    schema_version: str

    def __post_init__(self):
        if len(self.values) != len(SCHEMA):
            raise ValueError(f"expected {len(SCHEMA)} values, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("feature vector contains non-finite values")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def __getitem__(self, name: str) -> float:
        return self.values[SCHEMA.index(name)]


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; apostrophes inside words survive ("don't")."""
    return [t.strip("'") for t in _TOKEN_RE.findall(text.lower()) if t.strip("'")]


def _lexicon_count(tokens: list[str], lexicon: Lexicon) -> int:
    return sum(1 for t in tokens if t in lexicon.words)


def _as_lookup(reputation: ReputationLookup | Mapping[str, UrlReputation] | None) -> ReputationLookup:
    if reputation is None:
        return lambda url: UrlReputation(url=url)
    if callable(reputation):
        return reputation
    table: Mapping[str, UrlReputation] = reputation
    return lambda url: table.get(url, UrlReputation(url=url))


class FeatureExtractor:
    """Extraction with configurable lexicons, emoticon sets, and source markers."""

    def __init__(
        self,
        lexicons: dict[str, Lexicon] | None = None,
        schema: FeatureSchema = SCHEMA,
        happy_emoticons: tuple[str, ...] = HAPPY_EMOTICONS,
        sad_emoticons: tuple[str, ...] = SAD_EMOTICONS,
        mobile_source_markers: tuple[str, ...] = MOBILE_SOURCE_MARKERS,
        web_source_markers: tuple[str, ...] = WEB_SOURCE_MARKERS,
    ):
        self.lexicons = lexicons if lexicons is not None else load_lexicons()
        self.schema = schema
        self.happy_emoticons = happy_emoticons
        self.sad_emoticons = sad_emoticons
        self.mobile_source_markers = mobile_source_markers
        self.web_source_markers = web_source_markers

    def extract(
        self,
        tweet: TweetRecord,
        reputation: ReputationLookup | Mapping[str, UrlReputation] | None,
        now: datetime,
    ) -> FeatureVector:
        lookup = _as_lookup(reputation)
        text = tweet.text
        tokens = tokenize(text)
        author = tweet.author
        source = tweet.source_label.lower()

        letters = [c for c in text if c.isalpha()]
        uppercase_ratio = (
            sum(1 for c in letters if c.isupper()) / len(letters) if letters else 0.0
        )
        digit_ratio = sum(1 for c in text if c.isdigit()) / len(text) if text else 0.0

        age_seconds = max(0.0, (now - tweet.created_at).total_seconds())
        if author.created_at is not None:
            account_age_days = max(0.0, (now - author.created_at).total_seconds() / 86400.0)
        else:
            account_age_days = 0.0

        reps = [lookup(url) for url in tweet.urls]
        wot_scores = [r.wot_score for r in reps if r.wot_score is not None]
        ratios = [
            r.youtube_like_dislike_ratio
            for r in reps
            if r.youtube_like_dislike_ratio is not None
        ]

        values = {
            # meta
            "age_seconds": age_seconds,
            "source_is_web": float(any(m in source for m in self.web_source_markers)),
            "source_is_mobile": float(any(m in source for m in self.mobile_source_markers)),
            "has_geo": float(tweet.has_geo),
            # content, surface level
            "char_count": float(len(text)),
            "word_count": float(len(text.split())),
            "url_count": float(len(tweet.urls)),
            "hashtag_count": float(tweet.hashtag_count),
            "unique_char_count": float(len(set(text))),
            "has_stock_symbol": float(tweet.stock_symbol_count > 0),
            "has_happy_emoticon": float(any(e in text for e in self.happy_emoticons)),
            "has_sad_emoticon": float(any(e in text for e in self.sad_emoticons)),
            "contains_via": float(_VIA_RE.search(text) is not None),
            "contains_colon": float(":" in text),
            "exclamation_count": float(text.count("!")),
            "question_mark_count": float(text.count("?")),
            "uppercase_ratio": uppercase_ratio,
            "digit_ratio": digit_ratio,
            # content, lexicon categories
            "swear_count": float(_lexicon_count(tokens, self.lexicons["swear"])),
            "negative_emotion_count": float(_lexicon_count(tokens, self.lexicons["negative_emotion"])),
            "positive_emotion_count": float(_lexicon_count(tokens, self.lexicons["positive_emotion"])),
            "pronoun_count": float(_lexicon_count(tokens, self.lexicons["pronouns"])),
            "self_word_count": float(_lexicon_count(tokens, self.lexicons["self_words"])),
            "negation_count": float(_lexicon_count(tokens, self.lexicons["negations"])),
            "intensifier_count": float(_lexicon_count(tokens, self.lexicons["intensifiers"])),
            # author
            "followers_count": float(author.followers_count),
            "friends_count": float(author.friends_count),
            "statuses_count": float(author.statuses_count),
            "listed_count": float(author.listed_count),
            "is_verified": float(author.verified),
            "account_age_days": account_age_days,
            "has_location": float(bool(author.location)),
            "has_description": float(bool(author.description)),
            "has_profile_url": float(bool(author.profile_url)),
            "follower_friend_ratio": (
                author.followers_count / author.friends_count if author.friends_count else 0.0
            ),
            "statuses_per_day": (
                author.statuses_count / account_age_days if account_age_days > 0 else 0.0
            ),
            "statuses_follower_ratio": (
                author.statuses_count / author.followers_count if author.followers_count else 0.0
            ),
            # network
            "retweet_count": float(tweet.retweet_count),
            "mention_count": float(tweet.mention_count),
            "is_reply": float(tweet.is_reply),
            "is_retweet": float(tweet.is_retweet),
            # links
            "mean_wot_score": float(np.mean(wot_scores)) if wot_scores else 0.0,
            "min_wot_score": float(min(wot_scores)) if wot_scores else 0.0,
            "youtube_like_dislike_ratio": float(np.mean(ratios)) if ratios else 0.0,
            "has_reputation_data": float(any(r.has_data for r in reps)),
        }
        ordered = tuple(values[name] for name in self.schema.names)
        return FeatureVector(values=ordered, schema_version=self.schema.version)


_DEFAULT_EXTRACTOR: FeatureExtractor | None = None


def default_extractor() -> FeatureExtractor:
    global _DEFAULT_EXTRACTOR
    if _DEFAULT_EXTRACTOR is None:
        _DEFAULT_EXTRACTOR = FeatureExtractor()
    return _DEFAULT_EXTRACTOR


def extract_features(
    tweet: TweetRecord,
    reputation: ReputationLookup | Mapping[str, UrlReputation] | None,
    now: datetime,
) -> FeatureVector:
    """Extract with the bundled lexicons and default marker sets."""
    return default_extractor().extract(tweet, reputation, now)


def matrix_from_vectors(vectors: list[FeatureVector]) -> np.ndarray:
    """Stack vectors into an (n, 45) matrix, enforcing one schema version."""
    if not vectors:
        return np.empty((0, len(SCHEMA)))
    version = vectors[0].schema_version
    for v in vectors:
        check_schema_version(v.schema_version, version)
    return np.asarray([v.values for v in vectors], dtype=np.float64)
