"""Message/author data model, fixture parsing, and message sources.

The fixture wire format is newline-delimited JSON, one record per line,
with field names exactly matching the dataclasses below (documented in
``docs/fixture-schema.md``). Records are immutable after construction and
safe to share across threads.
"""

from __future__ import annotations

import json
import logging
import re
import time as _time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Protocol

import httpx

from .clock import format_timestamp, parse_timestamp, utcnow
from .errors import MalformedRecord, MissingRequiredField, NotFound, SourceUnavailable

logger = logging.getLogger(__name__)

# created_at may run slightly ahead of the parsing host's clock
FUTURE_TOLERANCE_S = 60.0

REQUIRED_FIELDS = ("id", "text", "created_at", "author")

AUTHOR_COUNT_FIELDS = ("followers_count", "friends_count", "statuses_count", "listed_count")

# entity-count resolution: entity lists beat explicit count fields beat
# tokenizing the text (the upstream API carries entities; bare fixtures may not)
_HASHTAG_RE = re.compile(r"#\w+")
_MENTION_RE = re.compile(r"@\w+")
_SYMBOL_RE = re.compile(r"\$[A-Za-z]{1,6}\b")
_URL_RE = re.compile(r"https?://\S+")


@dataclass(frozen=True)
class AuthorRecord:
    followers_count: int = 0
    friends_count: int = 0
    statuses_count: int = 0
    listed_count: int = 0
    verified: bool = False
    created_at: datetime | None = None
    location: str | None = None
    description: str | None = None
    profile_url: str | None = None


@dataclass(frozen=True)
class TweetRecord:
    id: str
    text: str
    created_at: datetime
    author: AuthorRecord
    source_label: str = ""
    has_geo: bool = False
    urls: tuple[str, ...] = ()
    hashtag_count: int = 0
    mention_count: int = 0
    stock_symbol_count: int = 0
    retweet_count: int = 0
    is_retweet: bool = False
    is_reply: bool = False


def _get_count(raw: dict, key: str) -> int:
    value = raw.get(key, 0)
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedRecord(f"{key} must be an integer, got {value!r}")
    if value < 0:
        raise MalformedRecord(f"{key} must be >= 0, got {value}")
    return value


def _get_bool(raw: dict, key: str) -> bool:
    value = raw.get(key, False)
    if not isinstance(value, bool):
        raise MalformedRecord(f"{key} must be a boolean, got {value!r}")
    return value


def _get_opt_str(raw: dict, key: str) -> str | None:
    value = raw.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise MalformedRecord(f"{key} must be a string, got {value!r}")
    return value


def _parse_author(raw: dict, tweet_created_at: datetime) -> AuthorRecord:
    created_raw = raw.get("created_at")
    if created_raw is not None:
        try:
            created = parse_timestamp(created_raw)
        except (ValueError, TypeError) as exc:
            raise MalformedRecord(f"author.created_at: {exc}") from exc
    else:
        created = tweet_created_at
    if created > tweet_created_at:
        # suspicious but tolerated; downstream age features clamp at zero
        logger.warning("author created_at %s is after tweet created_at %s", created, tweet_created_at)
    counts = {k: _get_count(raw, k) for k in AUTHOR_COUNT_FIELDS}
    return AuthorRecord(
        verified=_get_bool(raw, "verified"),
        created_at=created,
        location=_get_opt_str(raw, "location"),
        description=_get_opt_str(raw, "description"),
        profile_url=_get_opt_str(raw, "profile_url"),
        **counts,
    )


def _entity_list(entities: dict, key: str) -> list | None:
    value = entities.get(key)
    if value is None:
        return None
    if not isinstance(value, list):
        raise MalformedRecord(f"entities.{key} must be a list")
    return value


def _resolve_counts_and_urls(raw: dict, text: str) -> tuple[dict[str, int], list[str]]:
    """Counts and URLs from entity lists, else explicit fields, else the text."""
    entities = raw.get("entities")
    if entities is not None and not isinstance(entities, dict):
        raise MalformedRecord("entities must be an object")
    entities = entities or {}

    def count_of(entity_key: str, field: str, pattern: re.Pattern) -> int:
        listed = _entity_list(entities, entity_key)
        if listed is not None:
            return len(listed)
        if field in raw:
            return _get_count(raw, field)
        return len(pattern.findall(text))

    counts = {
        "hashtag_count": count_of("hashtags", "hashtag_count", _HASHTAG_RE),
        "mention_count": count_of("user_mentions", "mention_count", _MENTION_RE),
        "stock_symbol_count": count_of("symbols", "stock_symbol_count", _SYMBOL_RE),
        "retweet_count": _get_count(raw, "retweet_count"),
    }

    listed_urls = _entity_list(entities, "urls")
    if listed_urls is not None:
        urls = [u["url"] if isinstance(u, dict) else u for u in listed_urls]
    elif "urls" in raw:
        urls = raw["urls"]
    else:
        urls = _URL_RE.findall(text)
    if not isinstance(urls, list) or not all(isinstance(u, str) for u in urls):
        raise MalformedRecord("urls must be a list of strings")
    return counts, urls


def parse_tweet(raw: dict, now: datetime | None = None) -> TweetRecord:
    """Build a TweetRecord from one fixture-format record.

    Absent optional fields become empty/zero; absence of the optional author
    profile strings is preserved as None so presence features stay honest.
    Raises MissingRequiredField or MalformedRecord.
    """
    if not isinstance(raw, dict):
        raise MalformedRecord(f"record must be an object, got {type(raw).__name__}")
    for key in REQUIRED_FIELDS:
        if key not in raw or raw[key] is None:
            raise MissingRequiredField(f"missing required field {key!r}")
    tweet_id = raw["id"]
    if not isinstance(tweet_id, str) or not tweet_id:
        raise MalformedRecord(f"id must be a non-empty string, got {tweet_id!r}")
    text = raw["text"]
    if not isinstance(text, str):
        raise MalformedRecord(f"text must be a string, got {text!r}")
    try:
        created_at = parse_timestamp(raw["created_at"])
    except (ValueError, TypeError) as exc:
        raise MalformedRecord(f"created_at: {exc}") from exc
    clock_now = now if now is not None else utcnow()
    if (created_at - clock_now).total_seconds() > FUTURE_TOLERANCE_S:
        raise MalformedRecord(f"created_at {created_at} is in the future")
    if not isinstance(raw["author"], dict):
        raise MalformedRecord("author must be an object")

    counts, urls_raw = _resolve_counts_and_urls(raw, text)

    source_label = raw.get("source_label", "")
    if not isinstance(source_label, str):
        raise MalformedRecord(f"source_label must be a string, got {source_label!r}")

    return TweetRecord(
        id=tweet_id,
        text=text,
        created_at=created_at,
        author=_parse_author(raw["author"], created_at),
        source_label=source_label,
        has_geo=_get_bool(raw, "has_geo"),
        urls=tuple(urls_raw),
        is_retweet=_get_bool(raw, "is_retweet"),
        is_reply=_get_bool(raw, "is_reply"),
        **counts,
    )


def serialize_tweet(tweet: TweetRecord) -> dict:
    """Inverse of parse_tweet on valid records (round-trips exactly)."""
    author = tweet.author
    return {
        "id": tweet.id,
        "text": tweet.text,
        "created_at": format_timestamp(tweet.created_at),
        "source_label": tweet.source_label,
        "has_geo": tweet.has_geo,
        "urls": list(tweet.urls),
        "hashtag_count": tweet.hashtag_count,
        "mention_count": tweet.mention_count,
        "stock_symbol_count": tweet.stock_symbol_count,
        "retweet_count": tweet.retweet_count,
        "is_retweet": tweet.is_retweet,
        "is_reply": tweet.is_reply,
        "author": {
            "followers_count": author.followers_count,
            "friends_count": author.friends_count,
            "statuses_count": author.statuses_count,
            "listed_count": author.listed_count,
            "verified": author.verified,
            "created_at": format_timestamp(author.created_at) if author.created_at else None,
            "location": author.location,
            "description": author.description,
            "profile_url": author.profile_url,
        },
    }


@dataclass
class FixtureLoadReport:
    records: list[TweetRecord] = field(default_factory=list)
    skipped: int = 0
    skipped_lines: list[tuple[int, str]] = field(default_factory=list)


def load_fixture(path: Path | str, now: datetime | None = None) -> FixtureLoadReport:
    """Load a newline-delimited fixture file, skipping malformed lines.

    Skipped lines are reported with their 1-based line number and reason;
    the load never aborts on a bad line.
    """
    report = FixtureLoadReport()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                report.skipped += 1
                report.skipped_lines.append((lineno, f"bad json: {exc}"))
                continue
            try:
                report.records.append(parse_tweet(raw, now=now))
            except MalformedRecord as exc:
                report.skipped += 1
                report.skipped_lines.append((lineno, str(exc)))
    for lineno, reason in report.skipped_lines:
        logger.warning("fixture line %d skipped: %s", lineno, reason)
    return report


class TweetSource(Protocol):
    def get(self, tweet_id: str) -> TweetRecord: ...


class FixtureTweetSource:
    """Read-only source backed by an in-memory index of fixture records."""

    def __init__(self, records: Iterable[TweetRecord]):
        self._records = list(records)
        self._by_id = {t.id: t for t in self._records}

    @classmethod
    def from_file(cls, path: Path | str, now: datetime | None = None) -> "FixtureTweetSource":
        return cls(load_fixture(path, now=now).records)

    def __len__(self) -> int:
        return len(self._records)

    def list(self, offset: int = 0, limit: int = 20) -> list[TweetRecord]:
        return self._records[offset : offset + limit]

    def get(self, tweet_id: str) -> TweetRecord:
        try:
            return self._by_id[tweet_id]
        except KeyError:
            raise NotFound(f"tweet {tweet_id!r} not in fixture") from None


class HttpTweetSource:
    """Remote source fetching ``{base_url}/tweets/{id}`` as a fixture-format record."""

    def __init__(self, base_url: str, timeout: float = 5.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def get(self, tweet_id: str) -> TweetRecord:
        url = f"{self.base_url}/tweets/{tweet_id}"
        try:
            resp = httpx.get(url, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise SourceUnavailable(f"fetching {url}: {exc}") from exc
        if resp.status_code == 404:
            raise NotFound(f"tweet {tweet_id!r} not found upstream")
        if resp.status_code != 200:
            raise SourceUnavailable(f"upstream returned {resp.status_code} for {url}")
        try:
            return parse_tweet(resp.json())
        except (json.JSONDecodeError, MalformedRecord) as exc:
            raise SourceUnavailable(f"bad upstream payload for {url}: {exc}") from exc


class DelayedTweetSource:
    """Wraps a source with a fixed per-fetch delay, standing in for a slow upstream."""

    def __init__(self, inner: TweetSource, delay_s: float):
        self.inner = inner
        self.delay_s = delay_s

    def get(self, tweet_id: str) -> TweetRecord:
        _time.sleep(self.delay_s)
        return self.inner.get(tweet_id)
