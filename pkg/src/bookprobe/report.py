"""Aggregation of score records into tidy tables, plus CSV/JSONL export."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import ConfigError
from .scoring import ScoreRecord

__all__ = [
    "DIMENSIONS",
    "LANG_GROUPS",
    "AggregateRow",
    "AggregateTable",
    "lang_group",
    "bucket_by_length",
    "aggregate",
    "export",
    "read_table",
]

LANG_GROUPS = {
    "en": "english",
    "es": "official",
    "tr": "official",
    "vi": "official",
    "st": "unseen",
    "yo": "unseen",
    "tn": "unseen",
    "ty": "unseen",
    "mai": "unseen",
    "mg": "unseen",
}

DIMENSIONS = ("model", "lang", "lang_group", "task", "perturbation", "book", "length_bucket")


def lang_group(lang: str) -> str:
    return LANG_GROUPS.get(lang, "other")


def _bucket_label(tokens: int) -> str:
    if tokens < 50:
        return "0-50"
    if tokens < 100:
        return "50-100"
    return "100-400+"


@dataclass(frozen=True)
class BucketedRecord:
    record: ScoreRecord
    length_bucket: str | None = None


def bucket_by_length(
    scores: Iterable[ScoreRecord], token_counts: dict[str, int]
) -> list[BucketedRecord]:
    """Attach a token-range label per record; counts are keyed by passage_id."""
    out = []
    for record in scores:
        tokens = token_counts.get(record.passage_id)
        label = _bucket_label(tokens) if tokens is not None else None
        out.append(BucketedRecord(record=record, length_bucket=label))
    return out


@dataclass(frozen=True)
class AggregateRow:
    group: tuple[str, ...]
    n: int
    accuracy: float | None
    mean_metric: float | None


@dataclass(frozen=True)
class AggregateTable:
    group_by: tuple[str, ...]
    rows: tuple[AggregateRow, ...]

    @property
    def columns(self) -> list[str]:
        return [*self.group_by, "n", "accuracy", "mean_metric"]


def _dimension_value(item: BucketedRecord, dim: str) -> str:
    r = item.record
    if dim == "model":
        return r.endpoint_id
    if dim == "lang":
        return r.lang
    if dim == "lang_group":
        return lang_group(r.lang)
    if dim == "task":
        return r.task
    if dim == "perturbation":
        return r.perturbation
    if dim == "book":
        return r.book_id
    if dim == "length_bucket":
        return item.length_bucket or "unknown"
    raise ConfigError(f"unknown dimension {dim!r}; valid: {', '.join(DIMENSIONS)}")


def aggregate(
    scores: Iterable[ScoreRecord | BucketedRecord],
    group_by: list[str],
) -> AggregateTable:
    """Accuracy (boolean tasks) and mean ChrF++ (prefix) per group.

    Groups with no records are omitted; rows come out in lexicographic group
    order, so the table is invariant to input order.
    """
    for dim in group_by:
        if dim not in DIMENSIONS:
            raise ConfigError(f"unknown dimension {dim!r}; valid: {', '.join(DIMENSIONS)}")

    groups: dict[tuple[str, ...], list[ScoreRecord]] = {}
    for item in scores:
        bucketed = item if isinstance(item, BucketedRecord) else BucketedRecord(record=item)
        key = tuple(_dimension_value(bucketed, dim) for dim in group_by)
        groups.setdefault(key, []).append(bucketed.record)

    rows = []
    for key in sorted(groups):
        records = groups[key]
        flagged = [r.correct for r in records if r.correct is not None]
        metrics = [r.metric_value for r in records if r.metric_value is not None]
        rows.append(
            AggregateRow(
                group=key,
                n=len(records),
                accuracy=(sum(flagged) / len(flagged)) if flagged else None,
                mean_metric=(sum(metrics) / len(metrics)) if metrics else None,
            )
        )
    return AggregateTable(group_by=tuple(group_by), rows=tuple(rows))


def _format_value(value: float | int | str | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def export(table: AggregateTable, path: str | Path, fmt: str = "csv") -> Path:
    """Write the table as UTF-8 CSV or JSONL with a stable column order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow(
                    [*row.group, row.n, _format_value(row.accuracy), _format_value(row.mean_metric)]
                )
    elif fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for row in table.rows:
                payload = dict(zip(table.group_by, row.group))
                payload["n"] = row.n
                payload["accuracy"] = None if row.accuracy is None else round(row.accuracy, 4)
                payload["mean_metric"] = (
                    None if row.mean_metric is None else round(row.mean_metric, 4)
                )
                fh.write(json.dumps(payload, ensure_ascii=False) + "\n")
    else:
        raise ConfigError(f"unknown export format {fmt!r}")
    return path


def read_table(path: str | Path, group_by: list[str], fmt: str = "csv") -> AggregateTable:
    """Round-trip reader for exported tables."""
    path = Path(path)
    rows = []
    if fmt == "csv":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            for raw in reader:
                group = tuple(raw[: len(group_by)])
                n = int(raw[len(group_by)])
                acc = raw[len(group_by) + 1]
                mm = raw[len(group_by) + 2]
                rows.append(
                    AggregateRow(
                        group=group,
                        n=n,
                        accuracy=float(acc) if acc else None,
                        mean_metric=float(mm) if mm else None,
                    )
                )
    elif fmt == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                payload = json.loads(line)
                rows.append(
                    AggregateRow(
                        group=tuple(payload[dim] for dim in group_by),
                        n=payload["n"],
                        accuracy=payload["accuracy"],
                        mean_metric=payload["mean_metric"],
                    )
                )
    else:
        raise ConfigError(f"unknown export format {fmt!r}")
    return AggregateTable(group_by=tuple(group_by), rows=tuple(rows))
