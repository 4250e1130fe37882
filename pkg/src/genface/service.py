"""HTTP API for the design studio plus the live device-deploy channel.

All endpoints live under ``/api/v1``. Mutations go through the project
store's per-project lock and bump the project revision; a stale revision in
a write body is rejected with 409 so optimistic clients never double-apply.
Deploy sessions snapshot the project's bundle: pushed context events
regenerate the expression, and only faces that pass validation are ever
broadcast to stream subscribers (ordered by strictly increasing ``seq``).
"""

from __future__ import annotations

import asyncio
import json
import os
import secrets
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import pipeline, prompts, store as store_mod, svg_model
from .errors import (
    GenfaceError,
    NotFound,
    ProviderError,
    StaleRevision,
    UnknownElement,
    UnknownFactor,
    UnknownPhase,
    UnknownResult,
    UnknownToken,
)
from .pipeline import ProviderConfig, validate
from .project import Project, new_project, utc_now
from .prompts import PromptBundle, split_sections
from .rulebook import PHASE_EXPRESSION, PHASE_FACE, PHASES, SemanticTag, resolve_rules
from .store import DeployBundle, ProjectStore, export_bundle
from .svg_model import element_from_dict, element_to_dict

API_PREFIX = "/api/v1"

# reserved context factor: routes a deploy-session push to face regeneration
CHARACTER_DESCRIPTION = "character-description"

_NOT_FOUND_ERRORS = (NotFound, UnknownElement, UnknownResult, UnknownToken)


class ProjectCreate(BaseModel):
    name: str = Field(min_length=1)


class ProjectUpdate(BaseModel):
    revision: int
    name: str = Field(min_length=1)


class ElementIn(BaseModel):
    id: str
    kind: str
    geometry: dict
    fill: str = svg_model.DEFAULT_PALETTE[0]
    visible: bool = True
    revision: int | None = None


class ElementOrder(BaseModel):
    order: list[str]
    revision: int | None = None


class TagIn(BaseModel):
    element_id: str
    name: str
    category: str
    revision: int | None = None


class RuleIn(BaseModel):
    phase: str
    text: str = Field(min_length=1)
    category: str | None = None
    revision: int | None = None


class RuleUpdate(BaseModel):
    text: str = Field(min_length=1)
    category: str | None = None
    revision: int | None = None


class FactorIn(BaseModel):
    phase: str
    name: str = Field(min_length=1)
    description: str = ""
    sample_values: list[str] = Field(default_factory=list)
    revision: int | None = None


class MappingIn(BaseModel):
    phase: str
    text: str = Field(min_length=1)
    strict: bool = False
    revision: int | None = None


class TestIn(BaseModel):
    phase: str
    inputs: dict[str, str] = Field(default_factory=dict)
    candidates: int | None = Field(default=None, ge=1, le=10)
    tolerance_px: float | None = Field(default=None, ge=0)


class BaseIn(BaseModel):
    result_id: str
    override: bool = False
    revision: int | None = None


@dataclass
class DeploySession:
    token: str
    project_id: str
    bundle: DeployBundle
    template: svg_model.FaceTemplate
    latest_face: str
    created_at: str
    seq: int = 0
    subscribers: dict[int, asyncio.Queue] = field(default_factory=dict)
    next_subscriber: int = 0
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)

    def frame(self) -> dict:
        return {"seq": self.seq, "svg": self.latest_face}

    def broadcast(self) -> None:
        frame = self.frame()
        for queue in self.subscribers.values():
            queue.put_nowait(frame)


def _project_resource(project: Project) -> dict:
    data = project.to_dict()
    data["elements"] = [element_to_dict(el) for el in project.template.elements]
    data["resolved_rules"] = {
        phase: [r.to_dict() for r in resolve_rules(project, phase)] for phase in PHASES
    }
    return data


DEVICE_PAGE = """<!doctype html>
<html>
<head>
<meta charset="utf-8"/>
<meta name="viewport" content="width=device-width, initial-scale=1"/>
<title>genface device</title>
<style>
  html, body { margin: 0; height: 100%; background: #111; }
  #face { display: flex; align-items: center; justify-content: center; height: 100%; }
  #face svg { max-width: 100vw; max-height: 100vh; width: auto; height: auto; }
</style>
</head>
<body>
<div id="face"></div>
<script>
  const token = location.pathname.split("/").pop();
  const holder = document.getElementById("face");
  const source = new EventSource("/api/v1/deploy/" + token + "/stream");
  source.onmessage = (event) => {
    const frame = JSON.parse(event.data);
    holder.innerHTML = frame.svg;
  };
</script>
</body>
</html>
"""


def create_app(data_dir: str | Path | None = None,
               provider_cfg: ProviderConfig | None = None,
               provider=None,
               frontend_dist: str | Path | None = None) -> FastAPI:
    data_dir = Path(data_dir or os.environ.get("GENFACE_DATA_DIR", "./genface-data"))
    cfg = provider_cfg or ProviderConfig.from_env()

    app = FastAPI(title="genface", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.store = ProjectStore(data_dir)
    app.state.provider_cfg = cfg
    app.state.provider = provider  # None -> built per run from cfg
    app.state.sessions = {}

    def get_provider():
        return app.state.provider or pipeline.make_provider(app.state.provider_cfg)

    store: ProjectStore = app.state.store
    sessions: dict[str, DeploySession] = app.state.sessions

    @app.exception_handler(GenfaceError)
    async def genface_error_handler(request: Request, exc: GenfaceError):
        if isinstance(exc, _NOT_FOUND_ERRORS):
            status = 404
        elif isinstance(exc, StaleRevision):
            status = 409
        elif isinstance(exc, ProviderError):
            return JSONResponse(
                {"error": exc.code, "detail": str(exc), "retryable": exc.retryable},
                status_code=502,
            )
        else:
            status = 400
        return JSONResponse(exc.to_dict(), status_code=status)

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        errors = [
            {"path": ".".join(str(p) for p in e.get("loc", ())), "message": e.get("msg", "")}
            for e in exc.errors()
        ]
        return JSONResponse({"error": "E_VALIDATION", "detail": errors}, status_code=400)

    def load(project_id: str) -> Project:
        return store.load(project_id)

    def mutate(project_id: str, revision: int | None, fn):
        """Run a write under the project lock; stale revisions are rejected."""
        with store.lock(project_id):
            project = store.load(project_id)
            if revision is not None and revision != project.revision:
                raise StaleRevision(
                    "revision %s is stale; project is at %d" % (revision, project.revision)
                )
            outcome = fn(project)
            project.revision += 1
            store_mod.save_project_file(project, store.path(project_id))
        return project, outcome

    # -- project CRUD ---------------------------------------------------------

    @app.post(API_PREFIX + "/projects", status_code=201)
    def create_project(body: ProjectCreate):
        project = new_project(body.name)
        while store.exists(project.id):
            project.id += "-2"
        store.save(project)
        return _project_resource(project)

    @app.get(API_PREFIX + "/projects")
    def list_projects():
        return {"projects": store.list_ids()}

    @app.get(API_PREFIX + "/projects/{project_id}")
    def get_project(project_id: str):
        return _project_resource(load(project_id))

    @app.put(API_PREFIX + "/projects/{project_id}")
    def update_project(project_id: str, body: ProjectUpdate):
        def apply(project: Project):
            project.name = body.name
        project, _ = mutate(project_id, body.revision, apply)
        return _project_resource(project)

    @app.delete(API_PREFIX + "/projects/{project_id}", status_code=204)
    def delete_project(project_id: str):
        store.delete(project_id)
        return Response(status_code=204)

    # -- template elements -------------------------------------------------------

    @app.post(API_PREFIX + "/projects/{project_id}/elements", status_code=201)
    def add_element(project_id: str, body: ElementIn):
        element = element_from_dict(body.model_dump(exclude={"revision"}))
        project, _ = mutate(project_id, body.revision, lambda p: p.add_element(element))
        return _project_resource(project)

    @app.put(API_PREFIX + "/projects/{project_id}/elements")
    def reorder_elements(project_id: str, body: ElementOrder):
        project, _ = mutate(project_id, body.revision, lambda p: p.reorder_elements(body.order))
        return _project_resource(project)

    @app.put(API_PREFIX + "/projects/{project_id}/elements/{element_id}")
    def update_element(project_id: str, element_id: str, body: ElementIn):
        data = body.model_dump(exclude={"revision"})
        data["id"] = element_id

        def apply(project: Project):
            current = project.template.element(element_id)
            if current is None:
                raise UnknownElement("no element with id %r" % element_id)
            data.setdefault("tag", current.tag)
            project.update_element(element_from_dict(data))

        project, _ = mutate(project_id, body.revision, apply)
        return _project_resource(project)

    @app.delete(API_PREFIX + "/projects/{project_id}/elements/{element_id}")
    def delete_element(project_id: str, element_id: str):
        project, _ = mutate(project_id, None, lambda p: p.remove_element(element_id))
        return _project_resource(project)

    # -- tags ----------------------------------------------------------------------

    @app.post(API_PREFIX + "/projects/{project_id}/tags")
    def apply_tag(project_id: str, body: TagIn):
        tag = SemanticTag(body.name, body.category)
        project, injected = mutate(
            project_id, body.revision, lambda p: p.apply_tag(body.element_id, tag)
        )
        resource = _project_resource(project)
        resource["injected_rules"] = [r.to_dict() for r in injected]
        return resource

    @app.put(API_PREFIX + "/projects/{project_id}/tags/{element_id}")
    def retag_element(project_id: str, element_id: str, body: TagIn):
        tag = SemanticTag(body.name, body.category)
        project, _ = mutate(project_id, body.revision, lambda p: p.apply_tag(element_id, tag))
        return _project_resource(project)

    @app.delete(API_PREFIX + "/projects/{project_id}/tags/{element_id}")
    def remove_tag(project_id: str, element_id: str):
        project, _ = mutate(project_id, None, lambda p: p.remove_tag(element_id))
        return _project_resource(project)

    # -- rules ------------------------------------------------------------------------

    @app.post(API_PREFIX + "/projects/{project_id}/rules", status_code=201)
    def add_rule(project_id: str, body: RuleIn):
        project, outcome = mutate(
            project_id, body.revision,
            lambda p: p.add_rule(body.phase, body.text, body.category),
        )
        rule, warnings = outcome
        resource = _project_resource(project)
        resource["rule"] = rule.to_dict()
        resource["warnings"] = warnings
        return resource

    @app.put(API_PREFIX + "/projects/{project_id}/rules/{rule_id}")
    def update_rule(project_id: str, rule_id: str, body: RuleUpdate):
        project, outcome = mutate(
            project_id, body.revision,
            lambda p: p.update_rule(rule_id, body.text, body.category),
        )
        rule, warnings = outcome
        resource = _project_resource(project)
        resource["rule"] = rule.to_dict()
        resource["warnings"] = warnings
        return resource

    @app.delete(API_PREFIX + "/projects/{project_id}/rules/{rule_id}")
    def delete_rule(project_id: str, rule_id: str):
        project, _ = mutate(project_id, None, lambda p: p.remove_rule(rule_id))
        return _project_resource(project)

    # -- factors and mappings ---------------------------------------------------------

    @app.post(API_PREFIX + "/projects/{project_id}/factors", status_code=201)
    def add_factor(project_id: str, body: FactorIn):
        project, factor = mutate(
            project_id, body.revision,
            lambda p: p.define_context_factor(
                body.phase, body.name, body.description, tuple(body.sample_values)
            ),
        )
        resource = _project_resource(project)
        resource["factor"] = factor.to_dict()
        return resource

    @app.put(API_PREFIX + "/projects/{project_id}/factors/{phase}/{name}")
    def update_factor(project_id: str, phase: str, name: str, body: FactorIn):
        project, factor = mutate(
            project_id, body.revision,
            lambda p: p.update_context_factor(
                phase, name, body.description, tuple(body.sample_values)),
        )
        resource = _project_resource(project)
        resource["factor"] = factor.to_dict()
        return resource

    @app.delete(API_PREFIX + "/projects/{project_id}/factors/{phase}/{name}")
    def delete_factor(project_id: str, phase: str, name: str):
        project, _ = mutate(project_id, None, lambda p: p.remove_context_factor(phase, name))
        return _project_resource(project)

    @app.post(API_PREFIX + "/projects/{project_id}/mappings", status_code=201)
    def add_mapping(project_id: str, body: MappingIn):
        project, outcome = mutate(
            project_id, body.revision,
            lambda p: p.add_mapping_rule(body.phase, body.text, strict=body.strict),
        )
        mapping, warnings = outcome
        resource = _project_resource(project)
        resource["mapping"] = mapping.to_dict()
        resource["warnings"] = warnings
        return resource

    @app.put(API_PREFIX + "/projects/{project_id}/mappings/{mapping_id}")
    def update_mapping(project_id: str, mapping_id: str, body: MappingIn):
        project, outcome = mutate(
            project_id, body.revision,
            lambda p: p.update_mapping_rule(body.phase, mapping_id, body.text, body.strict),
        )
        mapping, warnings = outcome
        resource = _project_resource(project)
        resource["mapping"] = mapping.to_dict()
        resource["warnings"] = warnings
        return resource

    @app.delete(API_PREFIX + "/projects/{project_id}/mappings/{mapping_id}")
    def delete_mapping(project_id: str, mapping_id: str):
        def apply(project: Project):
            for phase in PHASES:
                if any(m.id == mapping_id for m in project.mapping_rules[phase]):
                    project.remove_mapping_rule(phase, mapping_id)
                    return
            raise NotFound("no mapping rule with id %r" % mapping_id)

        project, _ = mutate(project_id, None, apply)
        return _project_resource(project)

    # -- simulation and handoff ----------------------------------------------------------

    @app.post(API_PREFIX + "/projects/{project_id}/tests")
    def run_project_test(project_id: str, body: TestIn):
        if body.phase not in PHASES:
            raise UnknownPhase("phase must be one of %s" % (PHASES,))
        cfg = app.state.provider_cfg
        if body.candidates is not None:
            from dataclasses import replace
            cfg = replace(cfg, candidates_per_test=body.candidates)

        def apply(project: Project):
            return pipeline.run_test(
                project, body.phase, dict(body.inputs), cfg,
                provider=get_provider(), tolerance_px=body.tolerance_px,
            )

        project, results = mutate(project_id, None, apply)
        return {
            "project_id": project.id,
            "revision": project.revision,
            "results": [r.to_dict() for r in results],
        }

    @app.post(API_PREFIX + "/projects/{project_id}/base")
    def set_base(project_id: str, body: BaseIn):
        project, _ = mutate(
            project_id, body.revision,
            lambda p: pipeline.select_as_base(p, body.result_id, override=body.override),
        )
        return _project_resource(project)

    # -- deploy ---------------------------------------------------------------------------

    @app.post(API_PREFIX + "/projects/{project_id}/deploy", status_code=201)
    def deploy(project_id: str):
        project = load(project_id)
        bundle = export_bundle(project)
        token = secrets.token_urlsafe(16)
        sessions[token] = DeploySession(
            token=token,
            project_id=project.id,
            bundle=bundle,
            template=project.template,
            latest_face=bundle.base_face_svg,
            created_at=utc_now(),
        )
        return {"token": token, "device_url": "/device/%s" % token}

    def get_session(token: str) -> DeploySession:
        session = sessions.get(token)
        if session is None:
            raise UnknownToken("no deploy session for this token")
        return session

    @app.get(API_PREFIX + "/deploy/{token}/face")
    def latest_face(token: str):
        session = get_session(token)
        return Response(session.latest_face, media_type="image/svg+xml")

    @app.get(API_PREFIX + "/deploy/{token}/stream")
    async def stream(token: str):
        session = get_session(token)

        async def frames():
            queue: asyncio.Queue = asyncio.Queue()
            subscriber_id = session.next_subscriber
            session.next_subscriber += 1
            session.subscribers[subscriber_id] = queue
            try:
                yield "data: %s\n\n" % json.dumps(session.frame())
                while True:
                    try:
                        frame = await asyncio.wait_for(queue.get(), timeout=15.0)
                    except asyncio.TimeoutError:
                        yield ": ping\n\n"
                        continue
                    yield "data: %s\n\n" % json.dumps(frame)
            finally:
                session.subscribers.pop(subscriber_id, None)

        return StreamingResponse(frames(), media_type="text/event-stream")

    @app.post(API_PREFIX + "/deploy/{token}/context")
    async def push_context(token: str, event: dict[str, str]):
        session = get_session(token)
        received_at = utc_now()
        allowed = set(session.bundle.factor_names()) | {CHARACTER_DESCRIPTION}
        for name in event:
            if name not in allowed:
                raise UnknownFactor(
                    "factor %r is not in the deployed schema (allowed: %s)"
                    % (name, ", ".join(sorted(allowed)))
                )
        provider = get_provider()
        cfg = app.state.provider_cfg

        async with session.lock:
            if CHARACTER_DESCRIPTION in event:
                bundle_prompt, phase = _character_prompt(store, session, event)
            else:
                text = session.bundle.render_prompt(event)
                bundle_prompt = PromptBundle(
                    PHASE_EXPRESSION, tuple(split_sections(text, PHASE_EXPRESSION)), text,
                )
                phase = PHASE_EXPRESSION
            raw = await asyncio.to_thread(provider.generate, bundle_prompt, cfg)
            svg = pipeline.sanitize(raw)
            report = validate(svg, session.template, phase)
            if not report.valid:
                return JSONResponse(
                    {"error": "E_VALIDATION_FAILED", "report": report.to_dict()},
                    status_code=422,
                )
            session.seq += 1
            session.latest_face = svg
            session.broadcast()
            response = {"seq": session.seq, "svg": svg, "received_at": received_at,
                        "subscribers": len(session.subscribers)}
            if not session.subscribers:
                response["warning"] = "no subscribers connected"
            return response

    # -- device page and studio assets ------------------------------------------------------

    @app.get("/device/{token}", response_class=HTMLResponse)
    def device_page(token: str):
        get_session(token)
        return HTMLResponse(DEVICE_PAGE)

    dist = frontend_dist or os.environ.get("GENFACE_FRONTEND_DIST")
    if dist and Path(dist).is_dir():
        app.mount("/", StaticFiles(directory=dist, html=True), name="studio")

    return app


def _character_prompt(store: ProjectStore, session: DeploySession,
                      event: dict[str, str]) -> tuple[PromptBundle, str]:
    """Reserved character-description pushes re-run face generation."""
    project = store.load(session.project_id)
    inputs = {CHARACTER_DESCRIPTION: event[CHARACTER_DESCRIPTION]}
    bundle = prompts.assemble_face_prompt(project, inputs, allow_reserved=(CHARACTER_DESCRIPTION,))
    return bundle, PHASE_FACE


def main() -> None:
    import uvicorn

    bind = os.environ.get("GENFACE_BIND", "127.0.0.1:8777")
    host, _, port = bind.rpartition(":")
    uvicorn.run(create_app(), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
