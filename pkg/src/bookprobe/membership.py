"""Training-data membership lookup against an external n-gram index service.

Wire contract (docs/adapters.md): POST ``{base_url}/count`` with
``{"index": <index id>, "query": <text>}`` returning ``{"count": <int>}``.
Responses are cached on disk keyed by (index, query hash).
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import httpx

from .errors import MembershipUnavailableError
from .wire import RetryPolicy, post_with_retries

logger = logging.getLogger(__name__)

__all__ = ["IndexEndpoint", "MembershipClient", "check_seen"]

SEEN = "seen"
UNCLEAR = "unclear"


@dataclass(frozen=True)
class IndexEndpoint:
    base_url: str
    index_id: str
    timeout: float = 30.0


class MembershipClient:
    """Sliding-window membership queries with early exit and a disk cache."""

    def __init__(
        self,
        index: IndexEndpoint,
        cache_dir: str | Path | None = None,
        retry: RetryPolicy = RetryPolicy(),
        transport: httpx.BaseTransport | None = None,
    ):
        self.index = index
        self.retry = retry
        self.cache_dir = Path(cache_dir) if cache_dir else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._client = httpx.Client(
            base_url=index.base_url, timeout=index.timeout, transport=transport
        )
        self.queries_issued = 0

    def close(self) -> None:
        self._client.close()

    def _cache_path(self, query: str) -> Path | None:
        if not self.cache_dir:
            return None
        digest = hashlib.sha256(f"{self.index.index_id}\x1f{query}".encode()).hexdigest()
        return self.cache_dir / f"{digest}.json"

    def count(self, query: str) -> int:
        cache_path = self._cache_path(query)
        if cache_path and cache_path.exists():
            return json.loads(cache_path.read_text(encoding="utf-8"))["count"]
        try:
            response, _ = post_with_retries(
                self._client,
                "/count",
                {"index": self.index.index_id, "query": query},
                self.retry,
            )
        except Exception as exc:
            raise MembershipUnavailableError(
                f"index {self.index.index_id!r} unreachable: {exc}"
            ) from exc
        self.queries_issued += 1
        count = int(response.json()["count"])
        if cache_path:
            cache_path.write_text(json.dumps({"count": count}), encoding="utf-8")
        return count

    def check_seen(self, passage_text: str, window_words: int = 20) -> str:
        return check_seen(passage_text, self, window_words)


def check_seen(passage_text: str, client: MembershipClient, window_words: int = 20) -> str:
    """"seen" when any window of ``window_words`` words hits the index, else "unclear".

    Windows slide with stride 1; passages shorter than the window are queried
    whole. Query count is at most max(1, words - window + 1) thanks to the
    early exit on the first positive match.
    """
    if window_words < 1:
        raise ValueError("window_words must be >= 1")
    words = passage_text.split()
    if len(words) <= window_words:
        queries = [" ".join(words)] if words else []
    else:
        queries = [
            " ".join(words[i : i + window_words])
            for i in range(len(words) - window_words + 1)
        ]
    for query in queries:
        if client.count(query) > 0:
            return SEEN
    return UNCLEAR
