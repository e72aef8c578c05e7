"""Durable vote storage and the unanimity rule for alignment review.

Votes append to a single JSONL log that is flushed and fsynced before any
acknowledgement, so a killed server never loses an acked vote. The full log is
the audit trail; the latest vote per (item, annotator) wins.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

__all__ = ["ReviewItem", "Vote", "VoteStore", "finalize_unanimous", "FinalizedSets"]

VALID_VERDICTS = ("accept", "reject")
VALID_FLAGS = ("misaligned", "multiple_names")


@dataclass(frozen=True)
class ReviewItem:
    item_id: int
    passage_id: str
    book_id: str
    gold_name: str | None
    texts: dict[str, str]
    highlights: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "item_id": self.item_id,
            "passage_id": self.passage_id,
            "book_id": self.book_id,
            "gold_name": self.gold_name,
            "texts": self.texts,
            "highlights": {k: [list(s) for s in v] for k, v in self.highlights.items()},
        }


@dataclass(frozen=True)
class Vote:
    item_id: int
    annotator_id: str
    verdict: str
    flags: tuple[str, ...] = ()
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if self.verdict not in VALID_VERDICTS:
            raise ValueError(f"verdict must be one of {VALID_VERDICTS}")
        for flag in self.flags:
            if flag not in VALID_FLAGS:
                raise ValueError(f"unknown flag {flag!r}")


@dataclass(frozen=True)
class FinalizedSets:
    kept: tuple[int, ...]
    dropped: tuple[int, ...]
    pending: tuple[int, ...]


class VoteStore:
    """Append-only vote log with last-write-wins reads."""

    def __init__(self, log_path: str | Path):
        self.log_path = Path(log_path)
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._latest: dict[tuple[int, str], Vote] = {}
        self._audit: list[Vote] = []
        if self.log_path.exists():
            with open(self.log_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        payload = json.loads(line)
                        payload["flags"] = tuple(payload.get("flags", ()))
                        self._remember(Vote(**payload))
        self._fh = open(self.log_path, "a", encoding="utf-8")

    def _remember(self, vote: Vote) -> None:
        self._audit.append(vote)
        self._latest[(vote.item_id, vote.annotator_id)] = vote

    def record(self, vote: Vote) -> Vote:
        """Persist durably, then remember. Identical resubmission stores nothing new."""
        if not vote.timestamp:
            vote = Vote(
                item_id=vote.item_id,
                annotator_id=vote.annotator_id,
                verdict=vote.verdict,
                flags=vote.flags,
                timestamp=time.time(),
            )
        with self._lock:
            existing = self._latest.get((vote.item_id, vote.annotator_id))
            if (
                existing
                and existing.verdict == vote.verdict
                and existing.flags == vote.flags
            ):
                return existing
            line = json.dumps(
                {
                    "item_id": vote.item_id,
                    "annotator_id": vote.annotator_id,
                    "verdict": vote.verdict,
                    "flags": list(vote.flags),
                    "timestamp": vote.timestamp,
                },
                ensure_ascii=False,
            )
            self._fh.write(line + "\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())
            self._remember(vote)
            return vote

    def latest_votes(self) -> dict[tuple[int, str], Vote]:
        with self._lock:
            return dict(self._latest)

    def votes_for(self, item_id: int) -> list[Vote]:
        with self._lock:
            return [v for (iid, _), v in self._latest.items() if iid == item_id]

    def voted_items(self, annotator_id: str) -> set[int]:
        with self._lock:
            return {iid for (iid, aid) in self._latest if aid == annotator_id}

    def audit_trail(self) -> list[Vote]:
        with self._lock:
            return list(self._audit)

    def close(self) -> None:
        with self._lock:
            self._fh.close()


def finalize_unanimous(
    items: Iterable[ReviewItem],
    store: VoteStore,
    required_annotators: int = 3,
) -> FinalizedSets:
    """Partition items into kept / dropped / pending under the unanimity rule.

    An item is kept only when at least ``required_annotators`` latest votes all
    accept without flags; any reject or flag drops it; anything else is still
    pending. Idempotent for a frozen vote log.
    """
    kept, dropped, pending = [], [], []
    for item in items:
        votes = store.votes_for(item.item_id)
        if any(v.verdict == "reject" or v.flags for v in votes):
            dropped.append(item.item_id)
        elif len(votes) >= required_annotators and all(v.verdict == "accept" for v in votes):
            kept.append(item.item_id)
        else:
            pending.append(item.item_id)
    return FinalizedSets(
        kept=tuple(sorted(kept)),
        dropped=tuple(sorted(dropped)),
        pending=tuple(sorted(pending)),
    )
