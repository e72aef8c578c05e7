"""Provider-abstracted machine translation with retry, fallback, and QC checks.

Providers speak a minimal wire contract (docs/adapters.md): POST
``{base_url}/translate`` with ``{"texts": [...], "from": src, "to": tgt}``
returning ``{"translations": [...]}``. Credentials travel in an Authorization
header read from the environment variable named by the provider config.
"""

from __future__ import annotations

import logging
import os
import time
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable

import httpx

from .corpus import Passage
from .errors import TranslationError
from .perturb import PLACEHOLDER_TOKEN
from .wire import RetryPolicy

logger = logging.getLogger(__name__)

__all__ = [
    "ProviderConfig",
    "RetryPolicy",
    "QcVerdict",
    "MtClient",
    "qc_translation",
    "looks_english",
    "apply_qc_cascade",
]

ENGLISH_STOPWORDS = frozenset(
    "the of and a to in is was he she it that his her for with as on at by had not "
    "be this but from are or an were which you they we have him said".split()
)


@dataclass(frozen=True)
class ProviderConfig:
    name: str
    base_url: str
    auth_env: str | None = None
    timeout: float = 30.0

    def auth_header(self) -> dict[str, str]:
        if self.auth_env and os.environ.get(self.auth_env):
            return {"Authorization": f"Bearer {os.environ[self.auth_env]}"}
        return {}


@dataclass(frozen=True)
class QcVerdict:
    ok: bool
    reasons: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.ok != (not self.reasons):
            raise ValueError("ok must be True exactly when reasons is empty")


def looks_english(text: str) -> bool:
    """Cheap language check: mostly Latin script plus English stop-word density."""
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return False
    latin = sum(1 for ch in letters if "LATIN" in unicodedata.name(ch, ""))
    if latin / len(letters) < 0.6:
        return False
    words = [w.strip(".,;:!?\"'()").lower() for w in text.split()]
    words = [w for w in words if w]
    if not words:
        return False
    hits = sum(1 for w in words if w in ENGLISH_STOPWORDS)
    return hits / len(words) >= 0.15


def qc_translation(
    original_protected: str,
    translation: str,
    tgt: str,
    window_tokens: int = 15,
    max_repeats: int = 2,
    lang_detect: Callable[[str], bool] = looks_english,
) -> QcVerdict:
    """Three-way quality verdict for one translated passage.

    Flags placeholder_mismatch on any difference in placeholder counts (the
    source pipeline only flagged surpluses; any inequality loses the mask),
    ngram_repetition when any sliding window of ``window_tokens`` whitespace
    words occurs more than ``max_repeats`` times, and language_mismatch when a
    non-English target still reads as English.
    """
    reasons: set[str] = set()

    if translation.count(PLACEHOLDER_TOKEN) != original_protected.count(PLACEHOLDER_TOKEN):
        reasons.add("placeholder_mismatch")

    tokens = translation.split()
    if len(tokens) >= window_tokens:
        windows = Counter(
            tuple(tokens[i : i + window_tokens]) for i in range(len(tokens) - window_tokens + 1)
        )
        if windows and max(windows.values()) > max_repeats:
            reasons.add("ngram_repetition")

    if tgt != "en" and lang_detect(translation):
        reasons.add("language_mismatch")

    return QcVerdict(ok=not reasons, reasons=frozenset(reasons))


def apply_qc_cascade(
    passages: Iterable[Passage], verdicts: dict[str, QcVerdict]
) -> list[Passage]:
    """Drop every passage with a failed verdict, across all of its languages.

    One unacceptable translation deletes the whole aligned record, so the
    dataset stays language-complete.
    """
    flagged = {pid for pid, v in verdicts.items() if not v.ok}
    return [p for p in passages if p.passage_id not in flagged]


@dataclass
class BatchAudit:
    provider: str
    src: str
    tgt: str
    n_texts: int
    attempts: int
    status: str  # ok | transient_failure | permanent_failure


class MtClient:
    """Batch translator with retries on the primary provider and a fallback.

    Thread-safe: the underlying HTTP clients may be shared across threads, and
    per-call state stays local except the append-only audit trail.
    """

    def __init__(
        self,
        primary: ProviderConfig,
        fallback: ProviderConfig | None = None,
        retry: RetryPolicy = RetryPolicy(),
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.primary = primary
        self.fallback = fallback
        self.retry = retry
        self._sleep = sleep
        self._clients = {
            p.name: httpx.Client(
                base_url=p.base_url,
                headers=p.auth_header(),
                timeout=p.timeout,
                transport=transport,
            )
            for p in [primary] + ([fallback] if fallback else [])
        }
        self.audit: list[BatchAudit] = []

    def close(self) -> None:
        for client in self._clients.values():
            client.close()

    def _attempt(self, provider: ProviderConfig, texts: list[str], src: str, tgt: str) -> list[str]:
        client = self._clients[provider.name]
        payload = {"texts": texts, "from": src, "to": tgt}
        logger.debug("-> %s /translate %s", provider.name, _redact(repr(payload)))
        response = client.post("/translate", json=payload)
        logger.debug("<- %s %s %s", provider.name, response.status_code, _redact(response.text[:2000]))
        response.raise_for_status()
        translations = response.json()["translations"]
        if len(translations) != len(texts):
            raise TranslationError(
                f"{provider.name}: got {len(translations)} translations for {len(texts)} inputs"
            )
        return list(translations)

    def _with_retries(
        self, provider: ProviderConfig, texts: list[str], src: str, tgt: str
    ) -> tuple[list[str] | None, int]:
        for attempt in range(self.retry.max_attempts):
            try:
                result = self._attempt(provider, texts, src, tgt)
                logger.info(
                    "translate %s->%s via %s: %d texts ok (attempt %d)",
                    src, tgt, provider.name, len(texts), attempt + 1,
                )
                return result, attempt + 1
            except (httpx.TransportError, httpx.HTTPStatusError, TranslationError) as exc:
                logger.warning(
                    "translate %s->%s via %s failed on attempt %d: %s",
                    src, tgt, provider.name, attempt + 1, _redact(str(exc)),
                )
                if attempt + 1 < self.retry.max_attempts:
                    self._sleep(self.retry.delay(attempt))
        return None, self.retry.max_attempts

    def translate_batch(self, texts: list[str], src: str, tgt: str) -> list[str]:
        """One translation per input, order-preserving.

        Inputs containing masks must already be placeholder-protected. The
        primary provider is retried with backoff, then the fallback; if both
        are exhausted, TranslationError carries the failing indices.
        """
        if not texts:
            return []
        result, attempts = self._with_retries(self.primary, texts, src, tgt)
        if result is not None:
            self.audit.append(BatchAudit(self.primary.name, src, tgt, len(texts), attempts, "ok"))
            return result
        self.audit.append(
            BatchAudit(self.primary.name, src, tgt, len(texts), attempts, "permanent_failure")
        )
        if self.fallback is not None:
            result, attempts = self._with_retries(self.fallback, texts, src, tgt)
            status = "ok" if result is not None else "permanent_failure"
            self.audit.append(
                BatchAudit(self.fallback.name, src, tgt, len(texts), attempts, status)
            )
            if result is not None:
                return result
        raise TranslationError(
            f"all providers failed for {src}->{tgt}", failing_indices=list(range(len(texts)))
        )


def _redact(message: str) -> str:
    # Keep tokens out of logs even when providers echo headers in errors.
    return message.replace("Bearer ", "Bearer [redacted] ")
