"""HTTP API for the review loop, consumed by the browser UI.

Endpoints:
    GET  /api/session              — dataset/model identifiers and progress
    GET  /api/categories           — the error taxonomy (code + description)
    GET  /api/items                — review items, filterable by status
    POST /api/items/{id}/judgement — record a verdict (409 when already judged)
    POST /api/items/{id}/revoke    — withdraw a verdict
    POST /api/render               — surface forms of a value (for highlighting)
    POST /api/export/gold          — build and persist the gold dataset

The store serializes writes through a lock; reads are snapshots.  When a
built UI bundle is available its directory is mounted at the web root.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .active import (
    CATEGORIES,
    AlreadyJudgedError,
    MissingCategoryError,
    ReviewStore,
    UnknownItemError,
    annotation_metrics,
    correct,
)
from .rendering import renderings
from .sampling import write_dataset
from .turtle_light import Literal


class SessionOut(BaseModel):
    dataset: str
    model: str
    total: int
    judged: int
    pending: int


class TripleOut(BaseModel):
    p: str
    o: str
    dt: str


class ItemOut(BaseModel):
    id: str
    entity: str
    abstract: str
    triple: TripleOut
    kind: str
    fold: int | None
    status: str
    expected: list[TripleOut]
    renderings: list[str]


class JudgementIn(BaseModel):
    polarity: str = Field(pattern=r"^[+-]$")
    category: str | None = None
    annotator: str = "anonymous"


class JudgementOut(BaseModel):
    id: str
    status: str
    polarity: str
    category: str | None


class CategoryOut(BaseModel):
    code: str
    description: str


class RenderIn(BaseModel):
    o: str
    dt: str = "string"


class RenderOut(BaseModel):
    renderings: list[str]


class ExportOut(BaseModel):
    dataset: str
    gold: str
    removed: list[dict]
    added: list[dict]
    dropped_entities: list[str]
    metrics: dict


def _item_out(store: ReviewStore, item) -> ItemOut:
    example = next(e for e in store.dataset.examples if e.entity == item.entity)
    expected = [
        TripleOut(p=t.predicate, o=t.object.lexical, dt=t.object.datatype)
        for t in sorted(example.graph.triples, key=lambda t: t.sort_key())
    ]
    return ItemOut(
        id=item.id,
        entity=item.entity,
        abstract=item.abstract,
        triple=TripleOut(
            p=item.triple.predicate,
            o=item.triple.object.lexical,
            dt=item.triple.object.datatype,
        ),
        kind=item.kind,
        fold=item.fold,
        status=item.status,
        expected=expected,
        renderings=list(renderings(item.triple.object)),
    )


def create_app(store: ReviewStore, out_dir=None, static_dir=None) -> FastAPI:
    app = FastAPI(title="shaperex review API")
    lock = threading.Lock()
    out_path = Path(out_dir) if out_dir else None

    @app.get("/api/session", response_model=SessionOut)
    def session() -> SessionOut:
        return SessionOut(**store.progress())

    @app.get("/api/categories", response_model=list[CategoryOut])
    def categories() -> list[CategoryOut]:
        return [
            CategoryOut(code=code, description=description)
            for code, description in CATEGORIES.items()
        ]

    @app.get("/api/items", response_model=list[ItemOut])
    def items(status: str | None = None, limit: int = 50) -> list[ItemOut]:
        if status not in (None, "pending", "judged"):
            raise HTTPException(422, f"unknown status {status!r}")
        selected = store.items(status)[: max(limit, 0)]
        return [_item_out(store, item) for item in selected]

    @app.post("/api/items/{item_id}/judgement", response_model=JudgementOut)
    def judge(item_id: str, body: JudgementIn) -> JudgementOut:
        with lock:
            try:
                judgement = store.judge(
                    item_id, body.polarity, body.category, body.annotator
                )
            except UnknownItemError as err:
                raise HTTPException(404, str(err))
            except AlreadyJudgedError as err:
                raise HTTPException(409, str(err))
            except (MissingCategoryError, ValueError) as err:
                raise HTTPException(422, str(err))
        return JudgementOut(
            id=item_id,
            status="judged",
            polarity=judgement.polarity,
            category=judgement.category,
        )

    @app.post("/api/items/{item_id}/revoke", response_model=SessionOut)
    def revoke(item_id: str) -> SessionOut:
        with lock:
            try:
                store.revoke(item_id)
            except UnknownItemError as err:
                raise HTTPException(404, str(err))
            except ValueError as err:
                raise HTTPException(409, str(err))
        return SessionOut(**store.progress())

    @app.post("/api/render", response_model=RenderOut)
    def render(body: RenderIn) -> RenderOut:
        try:
            literal = Literal(body.o, body.dt)
        except ValueError as err:
            raise HTTPException(422, str(err))
        return RenderOut(renderings=list(renderings(literal)))

    @app.post("/api/export/gold", response_model=ExportOut)
    def export_gold() -> ExportOut:
        with lock:
            try:
                store.ensure_complete()
            except ValueError as err:
                raise HTTPException(409, str(err))
            judged = store.judged_items()
            gold, correction = correct(store.dataset, judged)
            metrics = annotation_metrics(judged, store.dataset)
            if out_path is not None:
                out_path.mkdir(parents=True, exist_ok=True)
                write_dataset(gold, out_path)
                (out_path / f"{gold.name}.correction.json").write_text(
                    json.dumps(correction.to_dict(), indent=2, sort_keys=True,
                               ensure_ascii=False) + "\n",
                    encoding="utf-8",
                )
        return ExportOut(metrics=metrics.to_dict(), **correction.to_dict())

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
