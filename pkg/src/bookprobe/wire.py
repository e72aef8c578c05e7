"""Retry policy and HTTP helpers shared by the wire-facing clients."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable

import httpx

logger = logging.getLogger(__name__)

__all__ = ["RetryPolicy", "post_with_retries"]


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff: tuple[float, ...] = (0.5, 1.0, 2.0)

    def delay(self, attempt: int) -> float:
        if not self.backoff:
            return 0.0
        return self.backoff[min(attempt, len(self.backoff) - 1)]


def _is_transient(exc: Exception) -> bool:
    if isinstance(exc, httpx.TransportError):
        return True
    if isinstance(exc, httpx.HTTPStatusError):
        status = exc.response.status_code
        return status == 429 or status >= 500
    return False


def post_with_retries(
    client: httpx.Client,
    url: str,
    payload: dict,
    retry: RetryPolicy,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[httpx.Response, int]:
    """POST with backoff on transient failures; returns (response, attempts).

    Transient means transport errors, 429, or 5xx. Anything else raises
    immediately; exhaustion re-raises the last transient error.
    """
    last_exc: Exception | None = None
    for attempt in range(retry.max_attempts):
        try:
            response = client.post(url, json=payload)
            response.raise_for_status()
            return response, attempt + 1
        except Exception as exc:
            if not _is_transient(exc):
                raise
            last_exc = exc
            logger.debug("transient failure on %s (attempt %d): %s", url, attempt + 1, exc)
            if attempt + 1 < retry.max_attempts:
                sleep(retry.delay(attempt))
    assert last_exc is not None
    raise last_exc
