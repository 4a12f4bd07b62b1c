"""Client-side latency benchmark against a running scoring service.

Measures elapsed time from the moment each request is sent to the moment
its response arrives, the same quantity a browser would observe, and
reports the empirical CDF with quantile estimates.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import httpx

from .service.analytics import LatencyReport, latency_report

DEFAULT_QUANTILES = (0.5, 0.8, 0.9, 0.99)


@dataclass
class BenchReport:
    base_url: str
    requests: int
    concurrency: int
    ok: int
    failed: int
    latency: LatencyReport

    def to_dict(self) -> dict:
        return {
            "base_url": self.base_url,
            "requests": self.requests,
            "concurrency": self.concurrency,
            "ok": self.ok,
            "failed": self.failed,
            "latency": self.latency.to_dict(),
        }

    def to_text(self) -> str:
        lines = [
            f"{self.requests} requests at concurrency {self.concurrency} "
            f"against {self.base_url}",
            f"ok {self.ok}, failed {self.failed}",
            self.latency.to_text(),
        ]
        return "\n".join(lines)


def fetch_fixture_ids(base_url: str, limit: int = 500, timeout: float = 10.0) -> list[str]:
    resp = httpx.get(
        f"{base_url.rstrip('/')}/v1/tweets", params={"offset": 0, "limit": limit}, timeout=timeout
    )
    resp.raise_for_status()
    return [t["id"] for t in resp.json()["tweets"]]


def run_bench(
    base_url: str,
    requests: int,
    concurrency: int,
    ids: list[str] | None = None,
    quantiles=DEFAULT_QUANTILES,
    timeout: float = 30.0,
) -> BenchReport:
    """Fire `requests` single-id score requests from `concurrency` workers.

    Request i scores ids[i % len(ids)]; with enough distinct ids every
    request is a cache miss (cold path), with few ids the cache stays warm.
    """
    if requests < 1:
        raise ValueError(f"requests must be >= 1, got {requests}")
    if concurrency < 1:
        raise ValueError(f"concurrency must be >= 1, got {concurrency}")
    base_url = base_url.rstrip("/")
    if ids is None:
        ids = fetch_fixture_ids(base_url, timeout=timeout)
    if not ids:
        raise ValueError("no tweet ids available to benchmark with")

    elapsed_ms: list[float] = [0.0] * requests
    statuses: list[int] = [0] * requests
    counter = {"next": 0}
    counter_lock = threading.Lock()

    def worker():
        with httpx.Client(timeout=timeout) as client:
            while True:
                with counter_lock:
                    i = counter["next"]
                    if i >= requests:
                        return
                    counter["next"] = i + 1
                payload = {"ids": [ids[i % len(ids)]]}
                t0 = time.perf_counter()
                try:
                    resp = client.post(f"{base_url}/v1/scores", json=payload)
                    statuses[i] = resp.status_code
                except httpx.HTTPError:
                    statuses[i] = -1
                elapsed_ms[i] = (time.perf_counter() - t0) * 1000.0

    threads = [threading.Thread(target=worker) for _ in range(concurrency)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    ok = sum(1 for s in statuses if s == 200)
    return BenchReport(
        base_url=base_url,
        requests=requests,
        concurrency=concurrency,
        ok=ok,
        failed=requests - ok,
        latency=latency_report(elapsed_ms, quantiles=quantiles),
    )


def write_report(report: BenchReport, out_path: Path | str) -> None:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    out.with_suffix(".txt").write_text(report.to_text() + "\n", encoding="utf-8")
