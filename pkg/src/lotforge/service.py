"""HTTP design service: catalog delivery, assignments, scenes, scoring.

Endpoints (JSON unless noted):

    GET  /api/catalog                      the active catalog document
    GET  /api/practice                     practice scene + match tolerances
    POST /api/assignments                  {participant_id, seed?} -> assignment
    POST /api/scenes                       scene document -> {scene_id}
    GET  /api/scenes/{id}                  stored scene document
    POST /api/scenes/validate-practice     scene document -> match report
    GET  /api/scenes/{id}/score            metric vector + breakdown
    GET  /api/scenes/{id}/plan.svg         plan view (query: shadows, sun, legend)
    POST /api/submissions                  {participant_id, scenario_id, scene_id,
                                            screenshot?} -> {submission_id}

Errors use {"code", "message", "details": []}. GETs never mutate; saves
are durable once acknowledged (see store.RecordStore). Participants are
identified by bearer participant_id only; this is a research tool, not a
hardened account system.
"""

from __future__ import annotations

import hashlib
import random
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import fixtures
from .catalog import Catalog, SCENARIO_GROUPS, builtin_catalog, catalog_document
from .codec import decode_scene, encode_scene
from .errors import LotforgeError, NotFoundError, SceneDocumentError
from .match import DEFAULT_TOLERANCES, match_replication
from .metrics import (
    DEFAULT_CONFIG,
    ScoreConfig,
    SunSample,
    config_digest,
    score_scene,
)
from .render import RenderOptions, render_plan
from .scene import validate_scene
from .store import RecordStore


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: list | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or []


class AssignmentRequest(BaseModel):
    participant_id: str
    seed: int | None = None


class SubmissionRequest(BaseModel):
    participant_id: str
    scenario_id: str
    scene_id: str
    screenshot: str | None = None


def _fisher_yates(items: list, rng: random.Random) -> list:
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randrange(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def _participant_rng(seed: int, participant_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{participant_id}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class DesignService:
    """Application state: catalog, config, store, assignment bookkeeping."""

    def __init__(
        self,
        data_dir: str | Path,
        seed: int = 0,
        catalog: Catalog | None = None,
        config: ScoreConfig | None = None,
    ):
        self.catalog = catalog or builtin_catalog()
        self.config = config or DEFAULT_CONFIG
        self.seed = seed
        self.store = RecordStore(data_dir)
        self.practice = fixtures.practice_scene()
        self._assign_lock = threading.Lock()
        self._assignments: dict[str, dict] = {}
        self._group_counts = {g: 0 for g in SCENARIO_GROUPS}
        for record in self.store.all("assignment"):
            body = dict(record["body"])
            body.setdefault("issued_at", record["created_at"])
            self._assignments[body["participant_id"]] = body
            self._group_counts[body["group"]] += 1

    def assign(self, participant_id: str, seed: int | None = None) -> dict:
        """Round-robin group assignment with a seeded scenario shuffle.

        Idempotent: a repeat call returns the stored assignment unchanged.
        """
        with self._assign_lock:
            existing = self._assignments.get(participant_id)
            if existing is not None:
                return existing
            group = min(SCENARIO_GROUPS, key=lambda g: (self._group_counts[g], g))
            rng = _participant_rng(self.seed if seed is None else seed, participant_id)
            order = _fisher_yates([f"{group}{n}" for n in range(1, 5)], rng)
            body = {
                "participant_id": participant_id,
                "group": group,
                "scenario_order": order,
            }
            record_id = self.store.append("assignment", body)
            body = dict(self.store.get("assignment", record_id)["body"])
            body["issued_at"] = self.store.get("assignment", record_id)["created_at"]
            self._assignments[participant_id] = body
            self._group_counts[group] += 1
            return body

    def save_scene(self, document: str) -> str:
        scene = self._decode(document)
        issues = validate_scene(scene, self.catalog)
        errors = [i for i in issues if i.severity == "error"]
        if errors:
            raise ApiError(
                422, "invalid-scene", "scene failed validation",
                [{"code": i.code, "instance_id": i.instance_id, "message": i.message}
                 for i in errors],
            )
        return self.store.append("scene", {"document": encode_scene(scene)})

    def get_scene_document(self, scene_id: str) -> str:
        try:
            return self.store.get("scene", scene_id)["body"]["document"]
        except NotFoundError:
            raise ApiError(404, "not-found", f"no scene {scene_id!r}") from None

    def _decode(self, document: str):
        try:
            return decode_scene(document)
        except SceneDocumentError as exc:
            raise ApiError(422, "bad-document", str(exc)) from exc


def create_app(
    data_dir: str | Path,
    seed: int = 0,
    catalog: Catalog | None = None,
    config: ScoreConfig | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    service = DesignService(data_dir, seed=seed, catalog=catalog, config=config)
    app = FastAPI(title="lotforge design service", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "bad-request",
                "message": "request body failed validation",
                "details": [
                    {"loc": list(map(str, e["loc"])), "message": e["msg"]}
                    for e in exc.errors()
                ],
            },
        )

    @app.exception_handler(LotforgeError)
    async def _domain_error(_request: Request, exc: LotforgeError):
        return JSONResponse(
            status_code=500,
            content={"code": "internal", "message": str(exc), "details": []},
        )

    @app.get("/api/catalog")
    def get_catalog():
        return catalog_document(service.catalog)

    @app.get("/api/practice")
    def get_practice():
        tol = DEFAULT_TOLERANCES
        return {
            "scene": encode_scene(service.practice),
            "tolerances": {
                "pos_eps": tol.pos_eps,
                "rot_eps": tol.rot_eps,
                "scale_eps": tol.scale_eps,
            },
        }

    @app.post("/api/assignments")
    def post_assignment(body: AssignmentRequest):
        if not body.participant_id.strip():
            raise ApiError(422, "bad-request", "participant_id must be non-empty")
        return service.assign(body.participant_id.strip(), body.seed)

    @app.post("/api/scenes", status_code=201)
    async def post_scene(request: Request):
        document = (await request.body()).decode("utf-8", errors="replace")
        scene_id = service.save_scene(document)
        return {"scene_id": scene_id}

    @app.get("/api/scenes/{scene_id}")
    def get_scene(scene_id: str):
        return Response(
            content=service.get_scene_document(scene_id),
            media_type="application/json",
        )

    @app.post("/api/scenes/validate-practice")
    async def validate_practice(request: Request):
        document = (await request.body()).decode("utf-8", errors="replace")
        candidate = service._decode(document)
        report = match_replication(candidate, service.practice, DEFAULT_TOLERANCES)
        return report.as_dict()

    @app.get("/api/scenes/{scene_id}/score")
    def get_score(scene_id: str):
        scene = decode_scene(service.get_scene_document(scene_id))
        result = score_scene(scene, service.catalog, service.config)
        etag = f'"{scene_id}-{config_digest(service.config)}"'
        return JSONResponse(
            content={
                "scores": {k: round(v, 6) for k, v in result.vector.as_dict().items()},
                "breakdown": result.breakdown.as_dict(),
            },
            headers={"ETag": etag},
        )

    @app.get("/api/scenes/{scene_id}/plan.svg")
    def get_plan(
        scene_id: str,
        shadows: bool = False,
        sun: str | None = None,
        legend: bool = False,
    ):
        scene = decode_scene(service.get_scene_document(scene_id))
        sun_sample = None
        if sun is not None:
            try:
                alt_text, az_text = sun.split(",")
                sun_sample = SunSample(float(alt_text), float(az_text), 1.0)
            except (ValueError, LotforgeError) as exc:
                raise ApiError(400, "bad-sun", f"sun must be 'altitude,azimuth': {exc}")
        svg = render_plan(
            scene, service.catalog,
            RenderOptions(show_shadows=shadows, sun=sun_sample, legend=legend),
        )
        etag = f'"{scene_id}-plan-{int(shadows)}-{sun or ""}-{int(legend)}"'
        return Response(content=svg, media_type="image/svg+xml", headers={"ETag": etag})

    @app.post("/api/submissions", status_code=201)
    def post_submission(body: SubmissionRequest):
        assignment = service._assignments.get(body.participant_id)
        if assignment is None or body.scenario_id not in assignment["scenario_order"]:
            raise ApiError(
                409, "conflict",
                f"scenario {body.scenario_id!r} is not in the participant's assignment",
            )
        document = service.get_scene_document(body.scene_id)
        scene = decode_scene(document)
        # The server always keeps its own plan view so every submission has a
        # viewable artifact even when no client screenshot arrives.
        plan_svg = render_plan(scene, service.catalog, RenderOptions(show_shadows=True))
        submission_id = service.store.append("submission", {
            "participant_id": body.participant_id,
            "scenario_id": body.scenario_id,
            "scene_id": body.scene_id,
            "screenshot": body.screenshot,
            "plan_svg": plan_svg,
        })
        return {"submission_id": submission_id}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
