"""Prompt construction and the resumable probing harness.

Requests go to chat-completion style endpoints: POST
``{base_url}/chat/completions`` with ``{"model", "messages", "temperature",
"max_tokens"}``. Results append to a JSONL sink keyed by
(passage_id, lang, task, endpoint, prompt fingerprint) so an interrupted run
resumes without re-issuing anything.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import httpx

from .corpus import Passage
from .errors import SinkWriteError, StructuralError
from .perturb import derive_seed, shuffle_words
from .wire import RetryPolicy, post_with_retries

logger = logging.getLogger(__name__)

__all__ = [
    "TASK_KINDS",
    "PERTURBATIONS",
    "ProbeTask",
    "EndpointConfig",
    "ProbeResult",
    "RunSummary",
    "JsonlResultSink",
    "build_prompt",
    "select_text",
    "split_for_prefix",
    "prompt_fingerprint",
    "run_suite",
    "load_results",
]

TASK_KINDS = ("direct_probe", "name_cloze", "prefix_probe")
PERTURBATIONS = ("standard", "masked", "shuffled", "masked_shuffled", "no_character")

_VALID_PERTURBATIONS = {
    "direct_probe": set(PERTURBATIONS),
    "name_cloze": {"masked", "masked_shuffled"},
    "prefix_probe": {"standard", "no_character"},
}

LANGUAGE_NAMES = {
    "en": "English",
    "es": "Spanish",
    "tr": "Turkish",
    "vi": "Vietnamese",
    "st": "Sesotho",
    "yo": "Yoruba",
    "tn": "Setswana",
    "ty": "Tahitian",
    "mai": "Maithili",
    "mg": "Malagasy",
}

RESPOND_IN_ENGLISH = " Respond in English."


def _load_template(name: str) -> str:
    return resources.files("bookprobe.templates").joinpath(name).read_text(encoding="utf-8")


_TEMPLATES = {
    "direct_probe": _load_template("direct_probing.txt"),
    "name_cloze": _load_template("name_cloze.txt"),
    "prefix_probe": _load_template("prefix_probing.txt"),
}

# Binds every result to the exact template bytes that produced its prompt.
TEMPLATE_VERSION = hashlib.sha256(
    "\x1e".join(_TEMPLATES[k] for k in TASK_KINDS).encode()
).hexdigest()[:12]


@dataclass(frozen=True)
class ProbeTask:
    kind: str
    perturbation: str = "standard"

    def __post_init__(self) -> None:
        if self.kind not in TASK_KINDS:
            raise ValueError(f"unknown task kind {self.kind!r}")
        if self.perturbation not in PERTURBATIONS:
            raise ValueError(f"unknown perturbation {self.perturbation!r}")
        if self.perturbation not in _VALID_PERTURBATIONS[self.kind]:
            raise ValueError(f"{self.kind} does not run on {self.perturbation} passages")

    @property
    def task_id(self) -> str:
        return f"{self.kind}:{self.perturbation}"

    def accepts(self, passage: Passage) -> bool:
        if self.perturbation == "no_character":
            return not passage.has_character
        return passage.has_character


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model_name: str
    endpoint_id: str = ""
    temperature: float = 0.0
    max_tokens: int = 100
    max_in_flight: int = 4
    retry: RetryPolicy = RetryPolicy()
    auth_env: str | None = None
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1 or self.max_in_flight < 1:
            raise ValueError("max_tokens and max_in_flight must be >= 1")
        if not self.endpoint_id:
            object.__setattr__(self, "endpoint_id", self.model_name)

    def auth_header(self) -> dict[str, str]:
        if self.auth_env and os.environ.get(self.auth_env):
            return {"Authorization": f"Bearer {os.environ[self.auth_env]}"}
        return {}


@dataclass(frozen=True)
class ProbeResult:
    passage_id: str
    book_id: str
    lang: str
    task: str
    perturbation: str
    endpoint_id: str
    fingerprint: str
    raw_response: str
    status: str  # ok | error
    error: str | None = None
    latency_s: float = 0.0
    attempts: int = 1
    timestamp: float = 0.0

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.passage_id, self.lang, f"{self.task}:{self.perturbation}", self.endpoint_id)


def select_text(task: ProbeTask, passage: Passage, lang: str) -> str:
    """The text variant a task runs on, with shuffles derived deterministically."""
    if lang not in passage.texts:
        raise StructuralError(f"passage {passage.passage_id!r} has no {lang!r} text")
    if not task.accepts(passage):
        kind = "a no-character" if task.perturbation == "no_character" else "a character"
        raise StructuralError(
            f"{task.task_id} needs {kind} passage; got {passage.passage_id!r}"
        )
    if task.perturbation in ("standard", "no_character"):
        return passage.texts[lang]
    if task.perturbation == "shuffled":
        return shuffle_words(
            passage.texts[lang], derive_seed(passage.passage_id, lang, "shuffled")
        )
    masked = passage.masked_texts.get(lang)
    if masked is None:
        raise StructuralError(f"passage {passage.passage_id!r} has no masked {lang!r} text")
    if task.perturbation == "masked":
        return masked
    return shuffle_words(masked, derive_seed(passage.passage_id, lang, "masked_shuffled"))


def split_for_prefix(text: str, mode: str = "words") -> tuple[str, str]:
    """(prefix, continuation) halves; word-count midpoint by default."""
    if mode == "words":
        words = text.split()
        cut = len(words) // 2
        return " ".join(words[:cut]), " ".join(words[cut:])
    if mode == "chars":
        cut = len(text) // 2
        return text[:cut], text[cut:]
    raise ValueError(f"unknown prefix split mode {mode!r}")


def build_prompt(
    task: ProbeTask,
    passage: Passage,
    lang: str,
    prefix_mode: str = "words",
) -> list[dict[str, str]]:
    """Chat messages for one (task, passage, language) cell."""
    text = select_text(task, passage, lang)
    if task.kind == "prefix_probe":
        text, _ = split_for_prefix(text, prefix_mode)
    note = RESPOND_IN_ENGLISH if (lang != "en" and task.kind != "prefix_probe") else ""
    content = _TEMPLATES[task.kind].format(
        language=LANGUAGE_NAMES.get(lang, lang),
        passage=text,
        answer_language_note=note,
    ).strip()
    return [{"role": "user", "content": content}]


def prompt_fingerprint(messages: list[dict[str, str]]) -> str:
    """Changes iff the prompt bytes or template version change."""
    payload = json.dumps(
        {"template_version": TEMPLATE_VERSION, "messages": messages},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class JsonlResultSink:
    """Append-only JSONL result store with serialized writes.

    Safe for concurrent appenders; previously persisted keys (and their
    fingerprints) are loaded at open so reruns can skip completed cells.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._seen: dict[tuple[str, str, str, str], str] = {}
        if self.path.exists():
            for record in load_results(self.path):
                self._seen[record.key] = record.fingerprint
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")

    def fingerprint_for(self, key: tuple[str, str, str, str]) -> str | None:
        return self._seen.get(key)

    def append(self, result: ProbeResult) -> None:
        line = json.dumps(result.__dict__, ensure_ascii=False, sort_keys=True)
        with self._lock:
            try:
                self._fh.write(line + "\n")
                self._fh.flush()
            except OSError as exc:
                raise SinkWriteError(f"cannot append to {self.path}: {exc}") from exc
            self._seen[result.key] = result.fingerprint

    def close(self) -> None:
        self._fh.close()


def load_results(path: str | Path) -> list[ProbeResult]:
    """Read a result file, sorted by key so output is order-independent."""
    results = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                results.append(ProbeResult(**json.loads(line)))
    return sorted(results, key=lambda r: r.key)


@dataclass
class RunSummary:
    issued: int = 0
    ok: int = 0
    errors: int = 0
    skipped_existing: int = 0
    skipped_incompatible: int = 0
    interrupted: bool = False
    by_endpoint: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def failing_endpoints(self) -> list[str]:
        """Endpoints whose every issued request errored."""
        return sorted(
            eid
            for eid, counts in self.by_endpoint.items()
            if counts.get("errors", 0) > 0 and counts.get("ok", 0) == 0
        )


class ChatClient:
    """Thin chat-completions client for one endpoint."""

    def __init__(
        self,
        endpoint: EndpointConfig,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self._sleep = sleep
        self._client = httpx.Client(
            base_url=endpoint.base_url,
            headers=endpoint.auth_header(),
            timeout=endpoint.timeout,
            transport=transport,
        )

    def complete(self, messages: list[dict[str, str]]) -> tuple[str, int]:
        payload = {
            "model": self.endpoint.model_name,
            "messages": messages,
            "temperature": self.endpoint.temperature,
            "max_tokens": self.endpoint.max_tokens,
        }
        response, attempts = post_with_retries(
            self._client, "/chat/completions", payload, self.endpoint.retry, self._sleep
        )
        return response.json()["choices"][0]["message"]["content"], attempts

    def close(self) -> None:
        self._client.close()


def _probe_one(
    client: ChatClient,
    task: ProbeTask,
    passage: Passage,
    lang: str,
    fingerprint: str,
    messages: list[dict[str, str]],
) -> ProbeResult:
    started = time.monotonic()
    base = dict(
        passage_id=passage.passage_id,
        book_id=passage.book_id,
        lang=lang,
        task=task.kind,
        perturbation=task.perturbation,
        endpoint_id=client.endpoint.endpoint_id,
        fingerprint=fingerprint,
        timestamp=time.time(),
    )
    try:
        raw, attempts = client.complete(messages)
        return ProbeResult(
            raw_response=raw,
            status="ok",
            latency_s=time.monotonic() - started,
            attempts=attempts,
            **base,
        )
    except Exception as exc:
        # Permanent failures become error rows; they are never dropped.
        return ProbeResult(
            raw_response="",
            status="error",
            error=f"{type(exc).__name__}: {exc}",
            latency_s=time.monotonic() - started,
            attempts=client.endpoint.retry.max_attempts,
            **base,
        )


def run_suite(
    dataset: list[Passage],
    tasks: list[ProbeTask],
    endpoints: list[EndpointConfig],
    sink: JsonlResultSink,
    langs: list[str] | None = None,
    transport_factory: Callable[[EndpointConfig], httpx.BaseTransport | None] | None = None,
    should_stop: Callable[[], bool] | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> RunSummary:
    """Issue every missing (passage, lang, task, endpoint) request.

    Cells already present in the sink with a matching prompt fingerprint are
    skipped, so rerunning after an interruption never duplicates a request.
    Concurrency is bounded per endpoint; ``should_stop`` is a cooperative
    cancel checked between submissions.
    """
    summary = RunSummary()
    clients = {
        ep.endpoint_id: ChatClient(
            ep, transport=transport_factory(ep) if transport_factory else None, sleep=sleep
        )
        for ep in endpoints
    }
    executors = {
        ep.endpoint_id: ThreadPoolExecutor(
            max_workers=ep.max_in_flight, thread_name_prefix=f"probe-{ep.endpoint_id}"
        )
        for ep in endpoints
    }
    for ep in endpoints:
        summary.by_endpoint[ep.endpoint_id] = {"ok": 0, "errors": 0}

    pending: set[Future] = set()
    abort: SinkWriteError | None = None

    def drain(block_all: bool) -> None:
        nonlocal abort
        while pending:
            done, _ = wait(pending, return_when=FIRST_COMPLETED)
            for future in done:
                pending.discard(future)
                result: ProbeResult = future.result()
                try:
                    sink.append(result)
                except SinkWriteError as exc:
                    # Abort carries the partial-progress report.
                    exc.partial_summary = summary  # type: ignore[attr-defined]
                    abort = abort or exc
                    continue
                counts = summary.by_endpoint[result.endpoint_id]
                if result.status == "ok":
                    summary.ok += 1
                    counts["ok"] += 1
                else:
                    summary.errors += 1
                    counts["errors"] += 1
            if not block_all:
                return

    try:
        for passage in dataset:
            for lang in langs or passage.languages:
                for task in tasks:
                    if not task.accepts(passage) or lang not in passage.texts:
                        summary.skipped_incompatible += 1
                        continue
                    messages = build_prompt(task, passage, lang)
                    fingerprint = prompt_fingerprint(messages)
                    for ep in endpoints:
                        if abort:
                            raise abort
                        if should_stop is not None and should_stop():
                            summary.interrupted = True
                            drain(block_all=True)
                            if abort:
                                raise abort
                            return summary
                        key = (passage.passage_id, lang, task.task_id, ep.endpoint_id)
                        if sink.fingerprint_for(key) == fingerprint:
                            summary.skipped_existing += 1
                            continue
                        summary.issued += 1
                        pending.add(
                            executors[ep.endpoint_id].submit(
                                _probe_one,
                                clients[ep.endpoint_id],
                                task,
                                passage,
                                lang,
                                fingerprint,
                                messages,
                            )
                        )
                        # Keep memory bounded on large runs.
                        if len(pending) >= 4 * sum(e.max_in_flight for e in endpoints):
                            drain(block_all=False)
        drain(block_all=True)
        if abort:
            raise abort
    finally:
        for executor in executors.values():
            executor.shutdown(wait=True)
        for client in clients.values():
            client.close()

    if summary.failing_endpoints:
        logger.warning("endpoints with only errors: %s", ", ".join(summary.failing_endpoints))
    return summary
