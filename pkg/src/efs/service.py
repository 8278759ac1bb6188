"""HTTP front for the factsheet toolkit.

All endpoints live under /api/v1 and speak JSON except the renderer,
which returns the rendered document itself.  Factsheet request bodies
are negotiated by content type: application/json means an interchange
document, anything else means canonical text.  Errors come back as
{code, message, span?} with 400 for malformed input, 404 for missing
sheets, 409 for stale revisions, and 422 for the publishable gate.
"""

from __future__ import annotations

import json
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analyze import corpus_stats
from .card import import_card
from .catalog import CATALOG, DIMENSIONS, SECTION_NAMES, KindMismatchError, UnknownQuestionError
from .diagnostics import FactsheetParseError, SourceSpan
from .model import Factsheet
from .render import RENDER_TARGETS, render
from .store import (
    ConflictError,
    FactsheetStore,
    InvalidIdError,
    NotFoundError,
    StorageError,
    UnknownTokenError,
)
from .textfmt import factsheet_to_dict, from_interchange, parse_canonical
from .validate import completeness, is_publishable, validate
from .vocab import VOCABULARIES

RENDER_MEDIA = {
    "hypertext": "text/html; charset=utf-8",
    "plainmark": "text/markdown; charset=utf-8",
    "card": "text/plain; charset=utf-8",
    "canonical": "text/plain; charset=utf-8",
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _span_dict(span: SourceSpan | None) -> dict | None:
    if span is None:
        return None
    return {"line": span.line, "column": span.column, "length": span.length}


def _error_body(code: str, message: str, span: SourceSpan | None = None) -> dict:
    body = {"code": code, "message": message}
    if span is not None:
        body["span"] = _span_dict(span)
    return body


def _visible_if_dict(predicate) -> dict | None:
    if predicate is None:
        return None
    return {"question": predicate.question_id,
            "contains_any": sorted(predicate.contains_any)}


# Token sets embedded in compound answer shapes, mirroring what the
# model enforces; lets clients offer pickers without knowing the names.
_AUX_VOCABULARY = {
    "size": "size_category",
    "splits": "split_kind",
    "validation": "validation_tag",
    "baselines": "baseline_tag",
    "robustness": "robustness_tag",
}


def schema_document() -> dict:
    questions = []
    for q in CATALOG:
        sub = None
        if q.sub_answer is not None:
            sub = {"key": q.sub_answer.key, "prompt": q.sub_answer.prompt,
                   "visible_if": _visible_if_dict(q.sub_answer.visible_if)}
        questions.append({
            "id": q.id,
            "dimension": q.dimension,
            "section": q.section,
            "field": q.attr,
            "prompt": q.prompt,
            "kind": q.answer_kind.value,
            "mandatory": q.mandatory,
            "vocabulary": q.vocabulary,
            "aux_vocabulary": _AUX_VOCABULARY.get(q.attr),
            "visible_if": _visible_if_dict(q.visible_if),
            "sub_answer": sub,
        })
    vocabularies = {}
    for name, voc in VOCABULARIES.items():
        vocabularies[name] = {
            "open": voc.open,
            "terms": [{"token": t, "display": voc.display_name(t)}
                      for t in voc.all_tokens()],
        }
    return {
        "format_version": "1.0",
        "dimensions": list(DIMENSIONS),
        "sections": dict(SECTION_NAMES),
        "questions": questions,
        "vocabularies": vocabularies,
    }


def _diagnostic_dict(d) -> dict:
    return {"code": d.code, "severity": d.severity.value, "message": d.message,
            "question_id": d.question_id, "span": _span_dict(d.span)}


def _completeness_dict(fs: Factsheet) -> dict:
    report = completeness(fs)
    return {"overall": report.overall,
            "dimensions": [{"dimension": s.dimension, "answered": s.answered,
                            "applicable": s.applicable, "ratio": s.ratio}
                           for s in report.scores]}


async def _read_factsheet(request: Request) -> Factsheet:
    "Interchange for JSON bodies, canonical text for everything else."
    raw = await request.body()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ApiError(400, "bad-encoding", "request body is not valid UTF-8")
    content_type = request.headers.get("content-type", "")
    if "json" in content_type.lower():
        return from_interchange(text)
    return parse_canonical(text)


def _entry_body(entry) -> dict:
    return {"id": entry.id, "revision": entry.revision,
            "updated_at": entry.updated_at.isoformat(),
            "factsheet": factsheet_to_dict(entry.factsheet)}


def _expected_revision(request: Request) -> Optional[int]:
    header = request.headers.get("if-match")
    if header is None:
        return None
    token = header.strip().removeprefix("W/").strip('"')
    if not token.isdigit():
        raise ApiError(400, "bad-if-match",
                       f"If-Match must be a revision number, got {header!r}")
    return int(token)


def create_app(store: FactsheetStore) -> FastAPI:
    app = FastAPI(title="efs", docs_url=None, redoc_url=None, openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["ETag"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(_error_body(exc.code, exc.message), exc.status)

    @app.exception_handler(FactsheetParseError)
    async def _parse_error(request: Request, exc: FactsheetParseError):
        first = exc.errors[0]
        return JSONResponse(_error_body(first.code, str(exc), first.span), 400)

    _STATUS = {NotFoundError: (404, "not-found"),
               ConflictError: (409, "conflict"),
               InvalidIdError: (400, "invalid-id"),
               UnknownTokenError: (400, "unknown-token"),
               UnknownQuestionError: (400, "unknown-question"),
               KindMismatchError: (400, "kind-mismatch"),
               StorageError: (500, "storage-failure")}

    for exc_type, (status, code) in _STATUS.items():
        def _handler(request: Request, exc, status=status, code=code):
            return JSONResponse(_error_body(code, str(exc)), status)
        app.add_exception_handler(exc_type, _handler)

    @app.get("/api/v1/schema")
    async def get_schema():
        return schema_document()

    @app.post("/api/v1/validate")
    async def post_validate(request: Request):
        fs = await _read_factsheet(request)
        return {"diagnostics": [_diagnostic_dict(d) for d in validate(fs)],
                "completeness": _completeness_dict(fs),
                "publishable": is_publishable(fs)}

    @app.post("/api/v1/render")
    async def post_render(request: Request, target: str = "hypertext"):
        if target not in RENDER_TARGETS:
            raise ApiError(400, "unknown-target",
                           f"target must be one of {', '.join(RENDER_TARGETS)}")
        fs = await _read_factsheet(request)
        return Response(render(fs, target), media_type=RENDER_MEDIA[target])

    @app.post("/api/v1/import/card")
    async def post_import_card(request: Request):
        raw = await request.body()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError(400, "bad-encoding", "request body is not valid UTF-8")
        report = import_card(text)
        return {"factsheet": factsheet_to_dict(report.factsheet),
                "notes": [_diagnostic_dict(n) for n in report.notes]}

    @app.get("/api/v1/factsheets")
    async def list_factsheets(filter: Optional[str] = None):
        parsed = None
        if filter is not None:
            question_id, sep, token = filter.partition(":")
            if not sep or not question_id or not token:
                raise ApiError(400, "bad-filter",
                               "filter must look like Qid:token, e.g. M1:model_llm")
            parsed = (question_id, token)
        items = store.list(parsed)
        return {"items": [{"id": l.id, "title": l.title,
                           "completeness": l.completeness} for l in items]}

    @app.get("/api/v1/factsheets/{sheet_id}")
    async def get_factsheet(sheet_id: str):
        entry = store.get(sheet_id)
        return JSONResponse(_entry_body(entry),
                            headers={"ETag": f'"{entry.revision}"'})

    @app.put("/api/v1/factsheets/{sheet_id}")
    async def put_factsheet(sheet_id: str, request: Request,
                            require: Optional[str] = None):
        if require is not None and require != "publishable":
            raise ApiError(400, "bad-require",
                           "the only supported gate is require=publishable")
        expected = _expected_revision(request)
        fs = await _read_factsheet(request)
        if require == "publishable" and not is_publishable(fs):
            blocking = [d for d in validate(fs) if d.severity.value == "error"]
            raise ApiError(422, "not-publishable",
                           f"{len(blocking)} validation errors block publishing")
        entry = store.put(sheet_id, fs, expected)
        body = {"id": entry.id, "revision": entry.revision,
                "updated_at": entry.updated_at.isoformat()}
        return JSONResponse(body, headers={"ETag": f'"{entry.revision}"'})

    @app.delete("/api/v1/factsheets/{sheet_id}")
    async def delete_factsheet(sheet_id: str):
        store.delete(sheet_id)
        return {"id": sheet_id, "deleted": True}

    @app.get("/api/v1/corpus/stats")
    async def get_corpus_stats():
        sheets = [e.factsheet for e in store.entries()]
        return corpus_stats(sheets).to_dict()

    return app


def serve(address: str, store_dir: str) -> None:
    "Run the service until interrupted; address is host:port."
    import uvicorn

    host, sep, port_text = address.rpartition(":")
    if not sep or not port_text.isdigit():
        raise ValueError(f"address must be host:port, got {address!r}")
    store = FactsheetStore(store_dir)
    uvicorn.run(create_app(store), host=host or "127.0.0.1",
                port=int(port_text), log_level="warning")
