"""URL reputation lookups (site-reputation score, video like/dislike ratio).

Providers degrade to absent values on any failure; a lookup never raises
into feature extraction. Results are cached for the process lifetime.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UrlReputation:
    url: str
    wot_score: float | None = None
    youtube_like_dislike_ratio: float | None = None

    @property
    def has_data(self) -> bool:
        return self.wot_score is not None or self.youtube_like_dislike_ratio is not None


class ReputationProvider(Protocol):
    def fetch(self, url: str) -> UrlReputation: ...


class NullReputationProvider:
    """No provider configured; every URL resolves to absent values."""

    def fetch(self, url: str) -> UrlReputation:
        return UrlReputation(url=url)


class StaticReputationProvider:
    """Recorded provider responses, keyed by URL.

    Fixture file: JSON object mapping url -> {"wot_score": 0..100,
    "youtube_like_dislike_ratio": >= 0}; either key may be absent.
    """

    def __init__(self, table: dict[str, dict]):
        self._table = table

    @classmethod
    def from_file(cls, path: Path | str) -> "StaticReputationProvider":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def fetch(self, url: str) -> UrlReputation:
        entry = self._table.get(url)
        if not entry:
            return UrlReputation(url=url)
        wot = entry.get("wot_score")
        ratio = entry.get("youtube_like_dislike_ratio")
        if wot is not None and not 0 <= wot <= 100:
            logger.warning("ignoring out-of-range wot_score %r for %s", wot, url)
            wot = None
        if ratio is not None and ratio < 0:
            logger.warning("ignoring negative like/dislike ratio %r for %s", ratio, url)
            ratio = None
        return UrlReputation(url=url, wot_score=wot, youtube_like_dislike_ratio=ratio)


class HttpReputationProvider:
    """Fetches ``{base_url}/reputation?url=...`` returning the fixture JSON shape."""

    def __init__(self, base_url: str, timeout: float = 3.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def fetch(self, url: str) -> UrlReputation:
        try:
            resp = httpx.get(
                f"{self.base_url}/reputation", params={"url": url}, timeout=self.timeout
            )
            if resp.status_code != 200:
                return UrlReputation(url=url)
            entry = resp.json()
        except (httpx.HTTPError, json.JSONDecodeError) as exc:
            logger.warning("reputation lookup failed for %s: %s", url, exc)
            return UrlReputation(url=url)
        return StaticReputationProvider({url: entry}).fetch(url)


class ReputationClient:
    """Caching front for a provider.

    Cache writes are serialized; lookups may run concurrently. Failures are
    cached as absent-valued entries for the process lifetime, matching the
    degrade-quietly contract.
    """

    def __init__(self, provider: ReputationProvider | None = None):
        self.provider = provider if provider is not None else NullReputationProvider()
        self._cache: dict[str, UrlReputation] = {}
        self._lock = threading.Lock()

    def lookup(self, url: str) -> UrlReputation:
        with self._lock:
            cached = self._cache.get(url)
        if cached is not None:
            return cached
        try:
            rep = self.provider.fetch(url)
        except Exception as exc:  # provider bugs must not break extraction
            logger.warning("reputation provider raised for %s: %s", url, exc)
            rep = UrlReputation(url=url)
        with self._lock:
            self._cache[url] = rep
        return rep

    def __call__(self, url: str) -> UrlReputation:
        return self.lookup(url)
