"""JSONL (de)serialization for paragraphs, passages, and score records (docs/schemas.md)."""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Iterable

from .corpus import Paragraph, Passage
from .scoring import ScoreRecord

__all__ = [
    "write_paragraphs",
    "read_paragraphs",
    "write_passages",
    "read_passages",
    "write_scores",
    "read_scores",
    "score_record_line",
]


def write_paragraphs(paragraphs: Iterable[Paragraph], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for p in paragraphs:
            fh.write(json.dumps(asdict(p), ensure_ascii=False, sort_keys=True) + "\n")
    return path


def read_paragraphs(path: str | Path) -> list[Paragraph]:
    paragraphs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                payload = json.loads(line)
                payload["sentence_ids"] = tuple(payload.get("sentence_ids", ()))
                paragraphs.append(Paragraph(**payload))
    return paragraphs


def write_passages(passages: Iterable[Passage], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for p in passages:
            fh.write(json.dumps(asdict(p), ensure_ascii=False, sort_keys=True) + "\n")
    return path


def read_passages(path: str | Path) -> list[Passage]:
    passages = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                payload = json.loads(line)
                passages.append(Passage(**payload))
    return passages


def score_record_line(record: ScoreRecord) -> str:
    """Canonical one-line serialization; stable across runs for regression diffs."""
    return json.dumps(asdict(record), ensure_ascii=False, sort_keys=True)


def write_scores(records: Iterable[ScoreRecord], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(score_record_line(record) + "\n")
    return path


def read_scores(path: str | Path) -> list[ScoreRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(ScoreRecord(**json.loads(line)))
    return records
