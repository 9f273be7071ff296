"""HTTP service: grounding queries, versioned KB edits, what-if scoring.

Single-writer / multi-reader: edits serialize through one lock and
produce a new immutable KB value; every read takes whatever snapshot is
current (or a retained historical version), so a grounding request can
never observe a half-applied batch.  The last 32 versions stay
queryable; older ones answer 409.

Endpoints (v1): POST /v1/ground, PATCH /v1/kb/edges, POST /v1/whatif,
GET /v1/kb, GET /v1/kb/version, GET /v1/scenes, GET /v1/scenes/{id},
GET /v1/health.
"""
from __future__ import annotations

import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import dataio
from .engine import EnergyWeights, GroundConfig, Scene, ground
from .errors import (
    AffgroundError,
    NotFoundError,
    ParseError,
    RangeError,
)
from .kb import KnowledgeBase, edit_edge
from .percept import EmbeddingTable

RETAINED_VERSIONS = 32


@dataclass
class AuditEntry:
    timestamp: float
    edits: list[dict]
    old_version: int
    new_version: int


@dataclass
class ServiceState:
    """Mutable service state; writes go through apply_edits only."""

    kb: KnowledgeBase
    scenes: dict[str, Scene] = field(default_factory=dict)
    embeddings: EmbeddingTable = field(default_factory=lambda: EmbeddingTable([]))
    config: GroundConfig = field(default_factory=GroundConfig)

    def __post_init__(self):
        self._lock = threading.Lock()
        self._history: OrderedDict[int, KnowledgeBase] = OrderedDict()
        self._history[self.kb.version] = self.kb
        self.audit_log: list[AuditEntry] = []

    def snapshot(self, version: int | None = None) -> KnowledgeBase:
        if version is None:
            return self.kb
        kb = self._history.get(version)
        if kb is None:
            raise VersionRetiredError(version)
        return kb

    def apply_edits(self, edits: list[dict]) -> int:
        """Validate and apply a batch atomically; returns the new version."""
        with self._lock:
            new_kb = apply_edit_batch(self.kb, edits)
            old = self.kb.version
            self.kb = new_kb
            self._history[new_kb.version] = new_kb
            while len(self._history) > RETAINED_VERSIONS:
                self._history.popitem(last=False)
            self.audit_log.append(
                AuditEntry(
                    timestamp=time.time(),
                    edits=edits,
                    old_version=old,
                    new_version=new_kb.version,
                )
            )
            return new_kb.version


class VersionRetiredError(AffgroundError):
    def __init__(self, version: int):
        super().__init__(f"kb version {version} is not retained")
        self.version = version


def apply_edit_batch(kb: KnowledgeBase, edits: list[dict]) -> KnowledgeBase:
    """All-or-nothing batch: one new version regardless of batch size."""
    staged = kb
    for i, e in enumerate(edits):
        try:
            staged = edit_edge(
                staged,
                kind=e["kind"],
                frm=e["from"],
                to=e["to"],
                weight=float(e["weight"]),
            )
        except KeyError as k:
            raise ParseError(f"edits[{i}]: missing field {k}") from None
        except (NotFoundError, RangeError, ValueError) as err:
            # invalid edits are a 422 regardless of flavor
            raise ParseError(f"edits[{i}]: {err}") from None
    if staged is kb:
        return kb
    # collapse intermediate version bumps into a single +1
    return KnowledgeBase(
        version=kb.version + 1,
        verbs=staged.verbs,
        properties=staged.properties,
        objects=staged.objects,
        vp_edges=staged.vp_edges,
        po_edges=staged.po_edges,
    )


def replay_audit(initial: KnowledgeBase, log: list[AuditEntry]) -> KnowledgeBase:
    """Re-apply the audit log from the initial KB; must match current."""
    kb = initial
    for entry in log:
        kb = apply_edit_batch(kb, entry.edits)
    return kb


def _parse_weights(body: dict) -> EnergyWeights:
    w = body.get("weights")
    if w is None:
        return EnergyWeights()
    if isinstance(w, list) and len(w) == 3:
        return EnergyWeights(*[float(x) for x in w])
    if isinstance(w, dict):
        return EnergyWeights(
            alpha=float(w.get("alpha", 1.0)),
            beta=float(w.get("beta", 1.0)),
            gamma=float(w.get("gamma", 1.0)),
        )
    raise ParseError("weights: expected [alpha, beta, gamma] or object")


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="affground", version="1")

    def resolve_scene(body: dict) -> Scene:
        if "scene_id" in body:
            scene = state.scenes.get(body["scene_id"])
            if scene is None:
                raise NotFoundError(f"unknown scene {body['scene_id']!r}")
            return scene
        if "scene" in body:
            return dataio.load_scene(dataio.canonical_bytes(body["scene"]))
        raise ParseError("request needs scene_id or inline scene")

    def ground_response(scene: Scene, verb: str, kb: KnowledgeBase,
                        weights: EnergyWeights, transient: bool = False) -> Response:
        result = ground(scene, verb, kb, state.embeddings, weights, state.config)
        doc = dataio.result_to_doc(result)
        if transient:
            doc["transient"] = True
        return Response(content=dataio.canonical_bytes(doc), media_type="application/json")

    async def read_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ParseError("request body must be a JSON object")
        if not isinstance(body, dict):
            raise ParseError("request body must be a JSON object")
        return body

    @app.exception_handler(NotFoundError)
    async def _nf(request, exc):
        return _error(404, str(exc))

    @app.exception_handler(VersionRetiredError)
    async def _vr(request, exc):
        return _error(409, str(exc))

    @app.exception_handler(AffgroundError)
    async def _ae(request, exc):
        return _error(422, str(exc))

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "kb_version": state.kb.version}

    @app.get("/v1/kb")
    async def get_kb():
        return Response(
            content=dataio.save_kb(state.kb), media_type="application/json"
        )

    @app.get("/v1/kb/version")
    async def get_kb_version():
        return {"version": state.kb.version}

    @app.get("/v1/scenes")
    async def list_scenes():
        return {"scenes": sorted(state.scenes)}

    @app.get("/v1/scenes/{scene_id}")
    async def get_scene(scene_id: str):
        scene = state.scenes.get(scene_id)
        if scene is None:
            raise NotFoundError(f"unknown scene {scene_id!r}")
        return Response(
            content=dataio.save_scene(scene), media_type="application/json"
        )

    @app.post("/v1/ground")
    async def post_ground(request: Request):
        body = await read_body(request)
        scene = resolve_scene(body)
        verb = body.get("verb")
        if not isinstance(verb, str):
            raise ParseError("verb: expected string")
        kb = state.snapshot(body.get("kb_version"))
        return ground_response(scene, verb, kb, _parse_weights(body))

    @app.patch("/v1/kb/edges")
    async def patch_edges(request: Request):
        body = await read_body(request)
        edits = body.get("edits")
        if not isinstance(edits, list):
            raise ParseError("edits: expected list of {kind, from, to, weight}")
        new_version = state.apply_edits(edits)
        return {"new_version": new_version}

    @app.post("/v1/whatif")
    async def post_whatif(request: Request):
        body = await read_body(request)
        scene = resolve_scene(body)
        verb = body.get("verb")
        if not isinstance(verb, str):
            raise ParseError("verb: expected string")
        edits = body.get("edits", [])
        if not isinstance(edits, list):
            raise ParseError("edits: expected list")
        transient_kb = apply_edit_batch(state.kb, edits)
        return ground_response(scene, verb, transient_kb, _parse_weights(body), transient=True)

    return app


def load_state(data_dir: str, config: GroundConfig = GroundConfig()) -> ServiceState:
    """Build service state from a data directory.

    Layout: kb.json (affkb/1), embeddings.bin or embeddings.json,
    scenes/*.json (affscene/1).
    """
    from pathlib import Path

    root = Path(data_dir)
    kb = dataio.load_kb((root / "kb.json").read_bytes())
    emb_path = root / "embeddings.bin"
    if not emb_path.exists():
        emb_path = root / "embeddings.json"
    embeddings = dataio.load_embeddings(emb_path.read_bytes())
    scenes = {}
    scenes_dir = root / "scenes"
    if scenes_dir.is_dir():
        for p in sorted(scenes_dir.glob("*.json")):
            scene = dataio.load_scene(p.read_bytes())
            scenes[scene.scene_id] = scene
    return ServiceState(kb=kb, scenes=scenes, embeddings=embeddings, config=config)
