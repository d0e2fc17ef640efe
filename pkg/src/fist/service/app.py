"""HTTP JSON API over an immutable corpus and a file-backed incident store.

The corpus is loaded once at startup and read-only over the wire; incident
creation and observation appends are the only mutating endpoints, and both
funnel through the store's single-writer lock. Errors are rendered
uniformly as ``{code, message, subject}``.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import __version__
from ..canonical import parse_timestamp, utc_now
from ..corpus import Corpus
from ..errors import (
    DuplicateIncidentId,
    FistError,
    MalformedId,
    NotFound,
    PhaseMismatch,
    SchemaError,
    UnknownDetection,
    UnknownTechnique,
)
from ..incident import (
    IncidentFlow,
    IncidentStore,
    ReportFormat,
    TechniqueObservation,
    annotate_incident,
    compute_coverage,
    flow_to_dict,
    render_report,
)
from ..interop import bundle_to_json, export_layer, export_stix_bundle, layer_to_json
from ..model import EntityKind, parse_entity_id
from ..query import build_matrix, entity_detail, matrix_to_dict
from .schemas import (
    CoverageOut,
    ErrorOut,
    IncidentIn,
    IncidentOut,
    ManifestOut,
    ObservationIn,
)

_STATUS_BY_CODE = {
    MalformedId.code: 400,
    SchemaError.code: 422,
    NotFound.code: 404,
    DuplicateIncidentId.code: 409,
    UnknownTechnique.code: 422,
    PhaseMismatch.code: 422,
    UnknownDetection.code: 422,
}

_ERROR_RESPONSES = {
    400: {"model": ErrorOut},
    404: {"model": ErrorOut},
    409: {"model": ErrorOut},
    422: {"model": ErrorOut},
}


def create_app(
    corpus: Corpus, store: IncidentStore, ui_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="FIST knowledge base", version=__version__)
    etag = f'"{corpus.source_digest}"'

    @app.exception_handler(FistError)
    async def fist_error_handler(request: Request, exc: FistError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "message": exc.message, "subject": exc.subject},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "ValidationError",
                "message": "; ".join(
                    f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}"
                    for e in exc.errors()
                ),
                "subject": None,
            },
        )

    def corpus_response(payload: dict) -> JSONResponse:
        return JSONResponse(content=payload, headers={"ETag": etag})

    @app.get("/api/corpus/manifest", response_model=ManifestOut, responses=_ERROR_RESPONSES)
    def get_manifest():
        return corpus_response(
            {
                "corpus_version": corpus.manifest.corpus_version,
                "source_digest": corpus.source_digest,
                "declared": corpus.manifest.counts(),
                "actual": corpus.catalog_counts(),
            }
        )

    @app.get("/api/entities/{entity_id}", responses=_ERROR_RESPONSES)
    def get_entity_by_id(entity_id: str):
        return corpus_response(entity_detail(corpus, parse_entity_id(entity_id)))

    @app.get("/api/matrix", responses=_ERROR_RESPONSES)
    def get_matrix():
        return corpus_response(matrix_to_dict(corpus, build_matrix(corpus)))

    @app.get("/api/incidents")
    def list_incidents() -> list[str]:
        return store.list()

    @app.post(
        "/api/incidents",
        status_code=201,
        response_model=IncidentOut,
        responses=_ERROR_RESPONSES,
    )
    def create_incident(body: IncidentIn):
        flow = IncidentFlow(
            incident_id=body.incident_id,
            title=body.title,
            summary=body.summary,
            created_at=utc_now(),
            observations=tuple(_observation(o) for o in body.observations),
        )
        annotated = annotate_incident(corpus, flow)
        store.store(annotated)
        return flow_to_dict(annotated)

    @app.post(
        "/api/incidents/{incident_id}/observations",
        response_model=IncidentOut,
        responses=_ERROR_RESPONSES,
    )
    def append_observation(incident_id: str, body: ObservationIn):
        def mutate(flow: IncidentFlow) -> IncidentFlow:
            extended = flow.observations + (_observation(body),)
            return annotate_incident(
                corpus,
                IncidentFlow(
                    incident_id=flow.incident_id,
                    title=flow.title,
                    summary=flow.summary,
                    created_at=flow.created_at,
                    observations=extended,
                ),
            )

        return flow_to_dict(store.update(incident_id, mutate))

    @app.get("/api/incidents/{incident_id}", response_model=IncidentOut, responses=_ERROR_RESPONSES)
    def get_incident(incident_id: str):
        return flow_to_dict(store.load(incident_id))

    @app.get(
        "/api/incidents/{incident_id}/coverage",
        response_model=CoverageOut,
        responses=_ERROR_RESPONSES,
    )
    def get_coverage(incident_id: str):
        flow = store.load(incident_id)
        return compute_coverage(corpus, flow).to_dict()

    @app.get("/api/incidents/{incident_id}/report", responses=_ERROR_RESPONSES)
    def get_report(incident_id: str, format: str = "markdown"):
        try:
            fmt = ReportFormat(format)
        except ValueError:
            raise SchemaError(
                f"format must be one of {', '.join(f.value for f in ReportFormat)}",
                subject=format,
            ) from None
        flow = store.load(incident_id)
        rendered = render_report(corpus, flow, compute_coverage(corpus, flow), fmt)
        media = "text/markdown" if fmt is ReportFormat.MARKDOWN else "application/json"
        return Response(content=rendered, media_type=media)

    @app.get("/api/export/stix", responses=_ERROR_RESPONSES)
    def export_stix(incident: list[str] = Query(default=[])):
        flows = [store.load(incident_id) for incident_id in incident]
        bundle = export_stix_bundle(corpus, flows)
        headers = {} if incident else {"ETag": etag}
        return Response(
            content=bundle_to_json(bundle), media_type="application/json", headers=headers
        )

    @app.get("/api/export/layer/{incident_id}", responses=_ERROR_RESPONSES)
    def export_incident_layer(incident_id: str):
        layer = export_layer(corpus, store.load(incident_id))
        return Response(content=layer_to_json(layer), media_type="application/json")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _observation(body: ObservationIn) -> TechniqueObservation:
    technique_id = _typed(body.technique, EntityKind.TECHNIQUE, "technique")
    phase_id = _typed(body.phase, EntityKind.PHASE, "phase")
    hits = frozenset(
        _typed(h, EntityKind.DETECTION, f"detection_hits[{i}]")
        for i, h in enumerate(body.detection_hits)
    )
    observed_at = parse_timestamp(body.observed_at) if body.observed_at else None
    return TechniqueObservation(
        technique_id=technique_id,
        phase_id=phase_id,
        observed_behavior=body.observed_behavior,
        detection_hits=hits,
        observed_at=observed_at,
    )


def _typed(value: str, kind: EntityKind, where: str):
    parsed = parse_entity_id(value)
    if parsed.kind is not kind:
        raise SchemaError(f"{where}: expected a {kind.value} id, got {value!r}")
    return parsed
