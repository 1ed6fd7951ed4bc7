"""Local investigation HTTP service.

Single-user, no auth: this runs on the investigator's own machine.
Detection is eager and immutable per investigation; tracing is
user-steered. Every mutation is an entry in a replay log, so any graph
revision can be rebuilt byte-identically, restarts resume from disk, and
retries with an idempotency key return the original response.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, Response

from chainsleuth.chaindata.address import Address
from chainsleuth.chaindata.models import TagCategory
from chainsleuth.chaindata.store import ChainStore, load_fixture
from chainsleuth.config import InvestigationConfig
from chainsleuth.errors import ChainsleuthError, ConfigError
from chainsleuth.heuristics import certain_set
from chainsleuth.pipeline import InvestigationResult, analyze_token, investigate
from chainsleuth.report import build_evidence_report, render
from chainsleuth.serialize import (
    attribution_to_list,
    canonical_json_bytes,
    graph_to_dict,
    laundering_to_dict,
    timeline_to_dict,
    window_to_dict,
)
from chainsleuth.trace import TraceGraph, apply_tag, expand_node, trace_funds


class ApiError(ChainsleuthError):
    def __init__(self, code: str, message: str, status: int = 400, detail=None):
        super().__init__(message)
        self.code = code
        self.status = status
        self.detail = detail


@dataclass
class InvestigationState:
    id: str
    fixtures_path: str
    token_hex: str
    config_overrides: dict
    revision: int = 0
    mutations: list[dict] = field(default_factory=list)
    annotations: dict[str, dict] = field(default_factory=dict)  # addr -> {category,label}
    audit: list[dict] = field(default_factory=list)
    idempotency: dict[str, dict] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "fixtures_path": self.fixtures_path,
            "token": self.token_hex,
            "config_overrides": self.config_overrides,
            "revision": self.revision,
            "mutations": self.mutations,
            "annotations": self.annotations,
            "audit": self.audit,
            "idempotency": self.idempotency,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "InvestigationState":
        return cls(
            id=payload["id"],
            fixtures_path=payload["fixtures_path"],
            token_hex=payload["token"],
            config_overrides=payload.get("config_overrides", {}),
            revision=payload.get("revision", 0),
            mutations=payload.get("mutations", []),
            annotations=payload.get("annotations", {}),
            audit=payload.get("audit", []),
            idempotency=payload.get("idempotency", {}),
        )


class InvestigationHub:
    """All service state. Everything durable lives under data_dir."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        self.inv_dir = os.path.join(data_dir, "investigations")
        os.makedirs(self.inv_dir, exist_ok=True)
        self._stores: dict[str, ChainStore] = {}
        self._analyses: dict[str, InvestigationResult] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global_lock = threading.Lock()

    # -- persistence ---------------------------------------------------

    def _state_path(self, inv_id: str) -> str:
        return os.path.join(self.inv_dir, f"{inv_id}.json")

    def save(self, state: InvestigationState) -> None:
        path = self._state_path(state.id)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(state.to_json(), fh, indent=2)
        os.replace(tmp, path)

    def load(self, inv_id: str) -> InvestigationState:
        path = self._state_path(inv_id)
        if not os.path.exists(path):
            raise ApiError("not_found", f"no investigation {inv_id!r}", status=404)
        with open(path, encoding="utf-8") as fh:
            return InvestigationState.from_json(json.load(fh))

    def lock(self, inv_id: str) -> threading.Lock:
        with self._global_lock:
            return self._locks.setdefault(inv_id, threading.Lock())

    def new_id(self) -> str:
        with self._global_lock:
            existing = [f for f in os.listdir(self.inv_dir) if f.endswith(".json")]
            return f"inv-{len(existing) + 1:06d}"

    # -- derived state ---------------------------------------------------

    def store_for(self, state: InvestigationState) -> ChainStore:
        key = state.fixtures_path
        with self._global_lock:
            if key not in self._stores:
                if not os.path.isdir(key):
                    raise ApiError("creation_error",
                                   f"fixture bundle not found: {key}", status=400)
                self._stores[key] = load_fixture(key)
            return self._stores[key]

    def config_for(self, state: InvestigationState) -> InvestigationConfig:
        try:
            return InvestigationConfig.from_overrides(**state.config_overrides)
        except ConfigError as exc:
            raise ApiError("config_error", str(exc)) from exc

    def analysis_for(self, state: InvestigationState) -> InvestigationResult:
        key = state.id
        with self._global_lock:
            cached = self._analyses.get(key)
        if cached is not None:
            return cached
        store = self.store_for(state)
        token = Address.from_hex(state.token_hex)
        if token not in store.tokens:
            raise ApiError("creation_error",
                           f"token {state.token_hex} not registered in the bundle")
        result = analyze_token(store, token, self.config_for(state))
        with self._global_lock:
            self._analyses[key] = result
        return result

    def graph_at(self, state: InvestigationState, revision: int) -> TraceGraph:
        """Deterministic rebuild: seed-level trace plus the first
        `revision` logged mutations."""
        if revision < 0 or revision > state.revision:
            raise ApiError("bad_revision",
                           f"revision {revision} does not exist (current "
                           f"{state.revision})", status=404)
        analysis = self.analysis_for(state)
        store = self.store_for(state)
        seeds = certain_set(analysis.attribution)
        if not seeds and analysis.primary_seed is not None:
            seeds = {analysis.primary_seed}
        config = analysis.config.trace
        graph = TraceGraph(seeds=set(seeds), config=config)
        from chainsleuth.trace import _make_node

        for seed in sorted(seeds):
            node = _make_node(store, seed, 0, config, analysis.attribution, is_seed=True)
            node.terminal = False
            node.reached_at = node.first_seen
            graph.nodes[seed] = node
        for seed in sorted(seeds):
            expand_node(graph, store, seed, analysis.attribution)

        for mutation in state.mutations[:revision]:
            addr = Address.from_hex(mutation["address"])
            if mutation["kind"] == "expand":
                expand_node(graph, store, addr, analysis.attribution)
            elif mutation["kind"] == "tag":
                apply_tag(graph, addr, mutation["category"], mutation["label"])
        # registry-independent annotations at this revision re-applied above;
        # nothing else mutates the graph
        return graph


def _graph_payload(hub: InvestigationHub, state: InvestigationState,
                   revision: int) -> dict:
    graph = hub.graph_at(state, revision)
    analysis = hub.analysis_for(state)
    payload = graph_to_dict(graph, analysis.config.anonymize)
    payload["revision"] = revision
    # annotations as of this revision, replayed from the mutation log so a
    # fetched revision never changes underneath later tagging
    annotations: dict[str, dict] = {}
    for mutation in state.mutations[:revision]:
        if mutation["kind"] == "tag":
            annotations[mutation["address"]] = {
                "category": mutation["category"], "label": mutation["label"],
            }
    payload["annotations"] = dict(sorted(annotations.items()))
    return payload


def create_app(data_dir: str = "data") -> FastAPI:
    hub = InvestigationHub(data_dir)
    app = FastAPI(title="chainsleuth service", docs_url=None, redoc_url=None)

    @app.exception_handler(ChainsleuthError)
    def _chainsleuth_error(request: Request, exc: ChainsleuthError):
        status = getattr(exc, "status", 400)
        return JSONResponse(status_code=status, content={
            "code": getattr(exc, "code", "error"),
            "message": str(exc),
            "detail": getattr(exc, "detail", None),
        })

    def _json_bytes(payload: bytes) -> Response:
        return Response(content=payload, media_type="application/json")

    @app.post("/investigations")
    def create_investigation(body: dict):
        source = body.get("source") or {}
        fixtures = source.get("fixtures")
        live = source.get("live")
        token_hex = body.get("token")
        if not token_hex:
            raise ApiError("creation_error", "missing 'token'")
        if bool(fixtures) == bool(live):
            raise ApiError("creation_error",
                           "exactly one of source.fixtures or source.live is required")
        if live:
            from chainsleuth.chaindata.client import API_KEY_ENV

            if not os.environ.get(API_KEY_ENV):
                raise ApiError(
                    "creation_error",
                    f"live mode requires the {API_KEY_ENV} environment variable",
                )
            raise ApiError("creation_error",
                           "live sources must be cached via the CLI first in this build")
        state = InvestigationState(
            id=hub.new_id(),
            fixtures_path=os.path.abspath(fixtures),
            token_hex=token_hex.lower(),
            config_overrides=body.get("config") or {},
        )
        # eager detection validates the source and token now
        analysis = hub.analysis_for(state)
        hub.save(state)
        return {
            "id": state.id,
            "revision": state.revision,
            "verdict": analysis.classification.verdict,
        }

    @app.get("/investigations/{inv_id}")
    def get_investigation(inv_id: str):
        state = hub.load(inv_id)
        analysis = hub.analysis_for(state)
        return {
            "id": state.id,
            "token": state.token_hex,
            "fixtures": state.fixtures_path,
            "revision": state.revision,
            "verdict": analysis.classification.verdict,
            "confidence": analysis.classification.confidence,
            "pump_and_dump": analysis.classification.pump_and_dump,
            "scam_window": window_to_dict(analysis.window),
            "audit": state.audit,
        }

    @app.get("/investigations/{inv_id}/timeline")
    def get_timeline(inv_id: str):
        state = hub.load(inv_id)
        analysis = hub.analysis_for(state)
        return _json_bytes(canonical_json_bytes(
            timeline_to_dict(analysis.timeline, analysis.config.anonymize)
        ))

    @app.get("/investigations/{inv_id}/verdict")
    def get_verdict(inv_id: str):
        state = hub.load(inv_id)
        analysis = hub.analysis_for(state)
        report = build_evidence_report(analysis, source_label=state.fixtures_path)
        model = report.model
        verdict = {
            "schema_version": model["schema_version"],
            "token": model["token"],
            "scam_window": model["scam_window"],
            "classification": model["classification"],
            "economics": model["economics"],
            "victims": model["victims"],
            "contract_analysis": model["contract_analysis"],
            "price_series": model["price_series"],
        }
        return _json_bytes(canonical_json_bytes(verdict))

    @app.get("/investigations/{inv_id}/attribution")
    def get_attribution(inv_id: str):
        state = hub.load(inv_id)
        analysis = hub.analysis_for(state)
        return _json_bytes(canonical_json_bytes(
            attribution_to_list(analysis.attribution, analysis.config.anonymize)
        ))

    @app.get("/investigations/{inv_id}/graph")
    def get_graph(inv_id: str, rev: Optional[int] = None):
        state = hub.load(inv_id)
        revision = state.revision if rev is None else rev
        return _json_bytes(canonical_json_bytes(_graph_payload(hub, state, revision)))

    @app.post("/investigations/{inv_id}/expand")
    def post_expand(inv_id: str, body: dict):
        with hub.lock(inv_id):
            state = hub.load(inv_id)
            key = body.get("idempotency_key")
            if key and key in state.idempotency:
                return state.idempotency[key]
            address_hex = body.get("address", "")
            try:
                address = Address.from_hex(address_hex)
            except ValueError as exc:
                raise ApiError("bad_address", str(exc)) from exc

            graph = hub.graph_at(state, state.revision)
            analysis = hub.analysis_for(state)
            store = hub.store_for(state)
            new_nodes, new_edges, status = expand_node(
                graph, store, address, analysis.attribution
            )
            if status == "expanded":
                state.mutations.append({"kind": "expand", "address": address.hex})
                state.revision += 1
            new_set = set(new_nodes)
            full = graph_to_dict(graph, False)
            response = {
                "revision": state.revision,
                "status": status,
                "delta": {
                    "nodes": [
                        n for n in full["nodes"]
                        if Address.from_hex(n["address"]) in new_set
                    ],
                    "edges": [
                        {
                            "from": src.hex, "to": dst.hex,
                            "value_wei": str(graph.edges[(src, dst)].value_wei),
                            "tx_count": graph.edges[(src, dst)].tx_count,
                        }
                        for (src, dst) in new_edges
                    ],
                },
            }
            if key:
                state.idempotency[key] = response
            hub.save(state)
            return response

    @app.post("/investigations/{inv_id}/tag")
    def post_tag(inv_id: str, body: dict):
        with hub.lock(inv_id):
            state = hub.load(inv_id)
            key = body.get("idempotency_key")
            if key and key in state.idempotency:
                return state.idempotency[key]
            address_hex = body.get("address", "")
            category = body.get("category", "")
            label = body.get("label", "")
            try:
                address = Address.from_hex(address_hex)
            except ValueError as exc:
                raise ApiError("bad_address", str(exc)) from exc
            try:
                TagCategory(category)
            except ValueError:
                raise ApiError("bad_category",
                               f"unknown tag category {category!r}") from None
            if not label:
                raise ApiError("bad_label", "tag label must be non-empty")

            previous = state.annotations.get(address.hex)
            state.annotations[address.hex] = {"category": category, "label": label}
            state.mutations.append({
                "kind": "tag", "address": address.hex,
                "category": category, "label": label,
            })
            state.revision += 1
            audit_entry = {
                "revision": state.revision,
                "action": "tag",
                "address": address.hex,
                "category": category,
                "label": label,
                "superseded": previous,
            }
            state.audit.append(audit_entry)
            response = {"revision": state.revision, "superseded": previous}
            if key:
                state.idempotency[key] = response
            hub.save(state)
            return response

    @app.get("/investigations/{inv_id}/report")
    def get_report(inv_id: str, format: str = "machine"):
        state = hub.load(inv_id)
        store = hub.store_for(state)
        token = Address.from_hex(state.token_hex)
        config = hub.config_for(state)
        contract_source = None
        source_path = os.path.join(state.fixtures_path, "contracts", f"{token.hex}.sol")
        if os.path.exists(source_path):
            with open(source_path, encoding="utf-8") as fh:
                contract_source = fh.read()
        result = investigate(store, token, config, contract_source=contract_source)
        report = build_evidence_report(result, source_label=state.fixtures_path)
        normalized = {"json": "machine", "md": "human"}.get(format, format)
        payload = render(report, normalized)
        media = "application/json" if normalized == "machine" else "text/markdown"
        return Response(content=payload, media_type=media)

    _mount_frontend(app)
    return app


def _mount_frontend(app: FastAPI) -> None:
    """Serve the built UI, when present, at /app."""
    here = os.path.dirname(os.path.abspath(__file__))
    candidates = [
        os.environ.get("CHAINSLEUTH_FRONTEND_DIR"),
        os.path.join(here, "..", "..", "..", "frontend", "dist"),
        os.path.join(os.getcwd(), "frontend", "dist"),
    ]
    for candidate in candidates:
        if candidate and os.path.isdir(candidate):
            from fastapi.staticfiles import StaticFiles

            app.mount("/app", StaticFiles(directory=candidate, html=True), name="app")

            @app.get("/")
            def index() -> FileResponse:
                return FileResponse(os.path.join(candidate, "index.html"))

            return
