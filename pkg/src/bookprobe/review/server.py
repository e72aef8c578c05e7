"""HTTP review server for human alignment verification.

Endpoints:
  GET  /api/items?annotator=<id>&batch=<n>  items the annotator has not voted on
  POST /api/votes                           persist a vote, ack after fsync
  GET  /api/progress                        per-annotator and per-item counts
  GET  /api/export                          unanimity-finalized item id sets

The static review UI bundle (frontend/dist) is served at the web root when
present.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, field_validator

from ..corpus import Passage
from ..perturb import find_alias_spans
from .store import ReviewItem, Vote, VoteStore, finalize_unanimous

__all__ = ["create_app", "items_from_passages", "load_items"]


def items_from_passages(passages: list[Passage], gazetteer=None) -> list[ReviewItem]:
    """Review items with per-language highlight spans over the gold name."""
    items = []
    for idx, p in enumerate(sorted(passages, key=lambda x: x.passage_id)):
        highlights: dict[str, list[tuple[int, int]]] = {}
        if p.has_character:
            for lang, text in p.texts.items():
                aliases: list[str] = []
                if gazetteer is not None:
                    aliases = gazetteer.character(p.book_id, p.gold_name).aliases_for(lang)
                elif p.name_aliases.get(lang):
                    aliases = [p.name_aliases[lang]]
                highlights[lang] = [(s, e) for s, e, _ in find_alias_spans(text, aliases)]
        items.append(
            ReviewItem(
                item_id=idx,
                passage_id=p.passage_id,
                book_id=p.book_id,
                gold_name=p.gold_name,
                texts=dict(p.texts),
                highlights=highlights,
            )
        )
    return items


def load_items(path: str | Path) -> list[ReviewItem]:
    """Read review items from a JSONL export (one item object per line)."""
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                payload = json.loads(line)
                payload["highlights"] = {
                    k: [tuple(s) for s in v] for k, v in payload.get("highlights", {}).items()
                }
                items.append(ReviewItem(**payload))
    return items


class VoteBody(BaseModel):
    item_id: int
    annotator_id: str
    verdict: str
    flags: list[str] = []

    @field_validator("verdict")
    @classmethod
    def _verdict_known(cls, v: str) -> str:
        if v not in ("accept", "reject"):
            raise ValueError("verdict must be accept or reject")
        return v


def create_app(
    items: list[ReviewItem],
    store: VoteStore,
    annotators: list[str],
    required_annotators: int = 3,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="bookprobe review server")
    by_id = {item.item_id: item for item in items}

    @app.get("/api/items")
    def get_items(annotator: str = Query(...), batch: int = Query(10, ge=1)) -> JSONResponse:
        if annotator not in annotators:
            raise HTTPException(status_code=404, detail=f"unknown annotator {annotator!r}")
        voted = store.voted_items(annotator)
        remaining = [item for item in items if item.item_id not in voted]
        remaining.sort(key=lambda item: item.item_id)
        return JSONResponse([item.to_payload() for item in remaining[:batch]])

    @app.post("/api/votes")
    def post_vote(body: VoteBody) -> dict:
        if body.item_id not in by_id:
            raise HTTPException(status_code=404, detail=f"unknown item {body.item_id}")
        if body.annotator_id not in annotators:
            raise HTTPException(status_code=404, detail=f"unknown annotator {body.annotator_id!r}")
        try:
            vote = Vote(
                item_id=body.item_id,
                annotator_id=body.annotator_id,
                verdict=body.verdict,
                flags=tuple(body.flags),
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        stored = store.record(vote)
        return {"ok": True, "item_id": stored.item_id, "annotator_id": stored.annotator_id}

    @app.get("/api/progress")
    def progress() -> dict:
        latest = store.latest_votes()
        per_annotator = {a: 0 for a in annotators}
        per_item: dict[int, int] = {item.item_id: 0 for item in items}
        for (item_id, annotator_id) in latest:
            if annotator_id in per_annotator:
                per_annotator[annotator_id] += 1
            if item_id in per_item:
                per_item[item_id] += 1
        return {
            "total_items": len(items),
            "annotators": per_annotator,
            "items_fully_voted": sum(
                1 for n in per_item.values() if n >= required_annotators
            ),
        }

    @app.get("/api/export")
    def export() -> dict:
        sets = finalize_unanimous(items, store, required_annotators)
        return {
            "kept": list(sets.kept),
            "dropped": list(sets.dropped),
            "pending": list(sets.pending),
        }

    if static_dir and Path(static_dir).is_dir():
        static_path = Path(static_dir)

        @app.get("/")
        def index() -> FileResponse:
            return FileResponse(static_path / "index.html")

        app.mount("/", StaticFiles(directory=static_path), name="static")

    return app
