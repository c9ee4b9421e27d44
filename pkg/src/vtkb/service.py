"""HTTP JSON service over an immutable knowledge base.

The knowledge base is parsed and validated once at startup and never
mutated afterwards, so every request is an isolated read-only
computation and identical requests yield identical responses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import selection
from .matching import candidates, match_report
from .model import (
    InvalidIndividual,
    KbError,
    KnowledgeBase,
    UnknownReference,
    validate,
)
from .queries import InvalidQuery, evaluate
from .rules import with_builtin_rules
from .textio import ParseError, SemanticError, parse_kb, parse_query
from .views import resolve_data_item, technique_from_individual, technique_ids
from .wire import (
    WireFormatError,
    decode_data_item,
    decode_plan,
    decode_scene,
    encode_bindings,
    encode_check,
    encode_match_response,
    encode_recommendation,
    encode_summary,
    encode_technique,
)


@dataclass(frozen=True)
class ServiceConfig:
    kb_path: str
    port: int = 8000
    default_rules_enabled: bool = True
    cors_allowed_origin: str = "*"

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")


def _parse_error_payload(exc: ParseError) -> dict[str, Any]:
    kind = "semantic_error" if isinstance(exc, SemanticError) else "parse_error"
    return {"error": kind, "line": exc.line, "column": exc.column,
            "message": exc.message, "expected": exc.expected}


def _error(status: int, payload: dict[str, Any]) -> JSONResponse:
    return JSONResponse(status_code=status, content=payload)


def create_app(kb: KnowledgeBase, *, default_rules_enabled: bool = True,
               cors_allowed_origin: str = "*") -> FastAPI:
    """Build the application around an already-loaded knowledge base."""
    effective = with_builtin_rules(kb) if default_rules_enabled else kb
    closure = effective.subsumption
    summary_doc = encode_summary(effective, validate(effective))
    technique_docs: dict[str, Any] = {}
    for tid in technique_ids(effective):
        try:
            technique_docs[tid] = encode_technique(
                technique_from_individual(effective, tid))
        except InvalidIndividual:
            continue  # validate() reports the gap; not served as a technique

    app = FastAPI(title="vtkb", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_allowed_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def run(compute: Callable[[], Any]) -> JSONResponse:
        try:
            return JSONResponse(content=compute())
        except selection.InfeasibleItem as exc:
            return _error(422, {"error": "infeasible_item",
                                "data": exc.data_id, "message": str(exc)})
        except ParseError as exc:
            return _error(400, _parse_error_payload(exc))
        except InvalidQuery as exc:
            return _error(400, {"error": "invalid_query", "message": str(exc)})
        except WireFormatError as exc:
            return _error(400, {"error": "invalid_body", "message": str(exc)})
        except KbError as exc:
            return _error(404, {"error": "not_found", "message": str(exc)})
        except ValueError as exc:
            return _error(400, {"error": "invalid_body", "message": str(exc)})

    async def handle(request: Request,
                     compute: Callable[[Any], Any]) -> JSONResponse:
        raw = await request.body()
        try:
            body = json.loads(raw if raw else b"null")
        except json.JSONDecodeError as exc:
            return _error(400, _parse_error_payload(
                ParseError(exc.lineno, exc.colno, exc.msg)))
        return run(lambda: compute(body))

    @app.get("/kb/summary")
    def kb_summary() -> JSONResponse:
        return run(lambda: summary_doc)

    @app.get("/techniques")
    def techniques() -> JSONResponse:
        return run(lambda: [technique_docs[tid] for tid in sorted(technique_docs)])

    @app.get("/techniques/{technique_id:path}")
    def technique_detail(technique_id: str) -> JSONResponse:
        def compute() -> Any:
            doc = technique_docs.get(technique_id)
            if doc is None:
                raise UnknownReference(technique_id,
                                       f"unknown technique: {technique_id}")
            return doc
        return run(compute)

    @app.post("/query")
    async def query_endpoint(request: Request) -> JSONResponse:
        def compute(body: Any) -> Any:
            if not isinstance(body, dict) or not isinstance(body.get("query"), str):
                raise WireFormatError("query", "expected a non-empty string")
            query = parse_query(body["query"])
            return encode_bindings(evaluate(effective, closure, query))
        return await handle(request, compute)

    @app.post("/match")
    async def match_endpoint(request: Request) -> JSONResponse:
        def compute(body: Any) -> Any:
            item = resolve_data_item(effective, decode_data_item(body))
            ids = candidates(effective, closure, item)
            reports = []
            for tid in technique_ids(effective):
                try:
                    reports.append(match_report(effective, closure, item, tid))
                except InvalidIndividual:
                    continue
            return encode_match_response(ids, reports)
        return await handle(request, compute)

    @app.post("/recommend")
    async def recommend_endpoint(request: Request) -> JSONResponse:
        def compute(body: Any) -> Any:
            if not isinstance(body, dict):
                raise WireFormatError("", "expected a JSON object")
            top_n = body.get("top_n", 5)
            if isinstance(top_n, bool) or not isinstance(top_n, int):
                raise WireFormatError("top_n", "expected an integer")
            scene = decode_scene(body)
            plans = selection.recommend(effective, closure, scene, top_n=top_n)
            return encode_recommendation(plans)
        return await handle(request, compute)

    @app.post("/check")
    async def check_endpoint(request: Request) -> JSONResponse:
        def compute(body: Any) -> Any:
            if not isinstance(body, dict):
                raise WireFormatError("", "expected a JSON object")
            scene = decode_scene(body.get("scene"), "scene")
            placements = decode_plan(body.get("plan"), "plan")
            return encode_check(selection.check(effective, scene, placements))
        return await handle(request, compute)

    return app


def load_app(config: ServiceConfig) -> FastAPI:
    with open(config.kb_path, "r", encoding="utf-8") as handle:
        kb = parse_kb(handle.read(), origin=config.kb_path)
    return create_app(kb, default_rules_enabled=config.default_rules_enabled,
                      cors_allowed_origin=config.cors_allowed_origin)


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted. Startup failures propagate."""
    import uvicorn
    app = load_app(config)
    uvicorn.run(app, host="0.0.0.0", port=config.port, log_level="warning")
