"""Command-line entry points: corpus tooling, incident workflow, service launcher.

Commands print human-readable text by default and machine-readable JSON with
``--json``. Exit codes: 0 success, 1 violations or domain errors, 2 usage.
"""

from __future__ import annotations

import functools
import json
from pathlib import Path

import click

from . import fixtures
from .canonical import utc_now
from .corpus import Corpus, diff_corpora, load_corpus, parse_document
from .errors import FistError
from .incident import (
    IncidentFlow,
    IncidentStore,
    ReportFormat,
    TechniqueObservation,
    annotate_incident,
    compute_coverage,
    flow_to_dict,
    render_report,
)
from .interop import bundle_to_json, export_layer, export_stix_bundle, layer_to_json
from .model import EntityKind, format_entity_id, parse_entity_id
from .query import build_matrix, entity_detail, matrix_to_dict
from .validator import validate_integrity, validate_manifest


class CliState:
    def __init__(self, corpus_path: Path | None, data_dir: Path, as_json: bool, allow_scale_drift: bool):
        self.corpus_path = corpus_path
        self.data_dir = data_dir
        self.as_json = as_json
        self.allow_scale_drift = allow_scale_drift
        self._corpus: Corpus | None = None

    @property
    def corpus(self) -> Corpus:
        if self._corpus is None:
            if self.corpus_path is None:
                self._corpus = fixtures.load_seed_corpus()
            else:
                self._corpus = load_corpus(
                    self.corpus_path, allow_scale_drift=self.allow_scale_drift
                )
        return self._corpus

    @property
    def store(self) -> IncidentStore:
        return IncidentStore(self.data_dir)

    def emit(self, payload: dict | list, human: str) -> None:
        if self.as_json:
            click.echo(json.dumps(payload, ensure_ascii=False, indent=2))
        else:
            click.echo(human)


def fist_errors(command):
    """Render domain errors as one-line failures with exit code 1."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except FistError as exc:
            raise click.ClickException(f"{exc.code}: {exc.message}") from exc

    return wrapper


@click.group()
@click.option(
    "--corpus",
    "corpus_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    envvar="FIST_CORPUS",
    default=None,
    help="Corpus document to operate on (defaults to the bundled seed corpus).",
)
@click.option(
    "--data-dir",
    type=click.Path(file_okay=False, path_type=Path),
    envvar="FIST_DATA_DIR",
    default=Path("fist-data"),
    show_default=True,
    help="Directory holding stored incidents.",
)
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
@click.option(
    "--allow-scale-drift",
    is_flag=True,
    help="Tolerate manifest counts that disagree with corpus content.",
)
@click.pass_context
def main(ctx, corpus_path, data_dir, as_json, allow_scale_drift):
    """Work with FIST corpora, incidents, and intelligence exports."""
    ctx.obj = CliState(corpus_path, data_dir, as_json, allow_scale_drift)


@main.command()
@click.argument("corpus_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--allow-scale-drift", is_flag=True, help="Count mismatches do not fail the check.")
@click.pass_obj
@fist_errors
def validate(state: CliState, corpus_file: Path, allow_scale_drift: bool):
    """Check a corpus document; exit 1 if violations are found."""
    draft = parse_document(_read_corpus_document(corpus_file))
    violations = validate_integrity(draft)
    mismatches = validate_manifest(draft)
    ok = not violations and (allow_scale_drift or not mismatches)
    payload = {
        "ok": ok,
        "violations": [v.to_dict() for v in violations],
        "count_mismatches": [m.to_dict() for m in mismatches],
    }
    lines = [
        f"{v.code} {format_entity_id(v.subject)}: {v.detail}" for v in violations
    ]
    lines += [
        f"CountMismatch {m.entity_class}: declared {m.declared}, actual {m.actual}"
        for m in mismatches
    ]
    summary = f"{len(violations)} violations"
    if mismatches:
        summary += f", {len(mismatches)} count mismatches"
        if allow_scale_drift:
            summary += " (tolerated)"
    lines.append(summary)
    state.emit(payload, "\n".join(lines))
    if not ok:
        raise SystemExit(1)


def _read_corpus_document(path: Path) -> dict:
    from .corpus import read_document

    return read_document(path)


@main.command()
@click.argument("entity_id")
@click.pass_obj
@fist_errors
def show(state: CliState, entity_id: str):
    """Print one entity with its resolved relationships."""
    detail = entity_detail(state.corpus, parse_entity_id(entity_id))
    lines = [f"{detail['id']}  {detail['name']}  [{detail['kind']}]"]
    if detail.get("provisional"):
        lines.append("provisional placeholder entry")
    if detail.get("description"):
        lines.append(detail["description"])
    for field in ("phase", "parent"):
        if field in detail:
            value = detail[field]
            rendered = value if isinstance(value, str) else f"{value['id']} {value['name']}"
            lines.append(f"{field}: {rendered}")
    for field in ("sub_techniques", "phases", "tactics", "detections", "mitigations", "tools", "techniques"):
        refs = detail.get(field)
        if refs:
            rendered = ", ".join(f"{r['id']} {r['name']}" for r in refs)
            lines.append(f"{field}: {rendered}")
    state.emit(detail, "\n".join(lines))


@main.command()
@click.pass_obj
@fist_errors
def matrix(state: CliState):
    """Render the phase/tactic/technique matrix."""
    payload = matrix_to_dict(state.corpus, build_matrix(state.corpus))
    lines = []
    for column in payload["columns"]:
        lines.append(f"== {column['phase']['name']} ({column['phase']['id']}) ==")
        for cell in column["cells"]:
            lines.append(f"  {cell['tactic']['id']} {cell['tactic']['name']}")
            for technique in cell["techniques"]:
                lines.append(f"    {technique['id']} {technique['name']}")
        for technique in column["unassigned"]:
            lines.append(f"  (no tactic) {technique['id']} {technique['name']}")
    if payload["orphan_tactics"]:
        lines.append("orphan tactics: " + ", ".join(payload["orphan_tactics"]))
    state.emit(payload, "\n".join(lines))


@main.command()
@click.argument("old", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("new", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_obj
@fist_errors
def diff(state: CliState, old: Path, new: Path):
    """Entity-level changes between two corpus documents."""
    old_corpus = load_corpus(old, allow_scale_drift=True)
    new_corpus = load_corpus(new, allow_scale_drift=True)
    changes = diff_corpora(old_corpus, new_corpus)
    payload = {
        "added": [format_entity_id(e) for e in sorted(changes.added)],
        "removed": [format_entity_id(e) for e in sorted(changes.removed)],
        "modified": [format_entity_id(e) for e in sorted(changes.modified)],
    }
    lines = [f"{label}: {', '.join(ids) if ids else '(none)'}" for label, ids in payload.items()]
    state.emit(payload, "\n".join(lines))


@main.group()
def export():
    """Interchange exports."""


@export.command("stix")
@click.option("--incident", "incident_ids", multiple=True, help="Include stored incidents as report objects.")
@click.pass_obj
@fist_errors
def export_stix(state: CliState, incident_ids: tuple[str, ...]):
    """STIX-style bundle of the corpus, optionally with incident reports."""
    flows = [state.store.load(incident_id) for incident_id in incident_ids]
    click.echo(bundle_to_json(export_stix_bundle(state.corpus, flows)), nl=False)


@export.command("layer")
@click.argument("incident_id")
@click.pass_obj
@fist_errors
def export_layer_cmd(state: CliState, incident_id: str):
    """Navigator layer for one stored incident."""
    layer = export_layer(state.corpus, state.store.load(incident_id))
    click.echo(layer_to_json(layer), nl=False)


@main.group()
def incident():
    """Create and analyze incident flows."""


@incident.command("new")
@click.argument("incident_id")
@click.option("--title", required=True)
@click.option("--summary", default="")
@click.pass_obj
@fist_errors
def incident_new(state: CliState, incident_id: str, title: str, summary: str):
    """Store a new, empty incident."""
    flow = annotate_incident(
        state.corpus,
        IncidentFlow(
            incident_id=incident_id, title=title, summary=summary, created_at=utc_now()
        ),
    )
    state.store.store(flow)
    state.emit(flow_to_dict(flow), f"stored incident {incident_id}")


@incident.command("add-observation")
@click.argument("incident_id")
@click.option("--technique", required=True, help="Technique id, e.g. T0003.")
@click.option("--phase", required=True, help="Phase id the technique was seen in.")
@click.option("--behavior", default="", help="Observed behavior text.")
@click.option("--hit", "hits", multiple=True, help="Detection id that fired (repeatable).")
@click.pass_obj
@fist_errors
def incident_add_observation(state, incident_id, technique, phase, behavior, hits):
    """Append one technique observation to a stored incident."""
    observation = TechniqueObservation(
        technique_id=_typed_id(technique, EntityKind.TECHNIQUE),
        phase_id=_typed_id(phase, EntityKind.PHASE),
        observed_behavior=behavior,
        detection_hits=frozenset(_typed_id(h, EntityKind.DETECTION) for h in hits),
    )

    def mutate(flow: IncidentFlow) -> IncidentFlow:
        return annotate_incident(
            state.corpus,
            IncidentFlow(
                incident_id=flow.incident_id,
                title=flow.title,
                summary=flow.summary,
                created_at=flow.created_at,
                observations=flow.observations + (observation,),
            ),
        )

    updated = state.store.update(incident_id, mutate)
    state.emit(
        flow_to_dict(updated),
        f"incident {incident_id} now has {len(updated.observations)} observations",
    )


def _typed_id(value: str, kind: EntityKind):
    parsed = parse_entity_id(value)
    if parsed.kind is not kind:
        raise click.ClickException(f"expected a {kind.value} id, got {value!r}")
    return parsed


@incident.command("report")
@click.argument("incident_id")
@click.option(
    "--format",
    "fmt",
    type=click.Choice([f.value for f in ReportFormat]),
    default=ReportFormat.MARKDOWN.value,
    show_default=True,
)
@click.pass_obj
@fist_errors
def incident_report(state: CliState, incident_id: str, fmt: str):
    """Standardized incident report, grouped by kill-chain phase."""
    flow = state.store.load(incident_id)
    coverage = compute_coverage(state.corpus, flow)
    click.echo(
        render_report(state.corpus, flow, coverage, ReportFormat(fmt)), nl=False
    )


@incident.command("coverage")
@click.argument("incident_id")
@click.pass_obj
@fist_errors
def incident_coverage(state: CliState, incident_id: str):
    """Coverage and gap metrics for a stored incident."""
    flow = state.store.load(incident_id)
    report = compute_coverage(state.corpus, flow)
    payload = report.to_dict()
    lines = [
        f"phase coverage: {report.phase_coverage:.4f}",
        f"detection opportunity: {report.detection_opportunity:.4f}",
        f"detection realized: {report.detection_realized:.4f}",
    ]
    if payload["gaps"]:
        lines += [f"gap {g['technique_id']}: {g['reason']}" for g in payload["gaps"]]
    else:
        lines.append("no gaps")
    state.emit(payload, "\n".join(lines))


@incident.command("list")
@click.pass_obj
@fist_errors
def incident_list(state: CliState):
    """Ids of all stored incidents."""
    ids = state.store.list()
    state.emit(ids, "\n".join(ids) if ids else "(no incidents)")


@main.command()
@click.option("--addr", envvar="FIST_ADDR", default="127.0.0.1:8787", show_default=True)
@click.option(
    "--data-dir",
    "data_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Overrides the global incident directory.",
)
@click.option(
    "--ui-dir",
    envvar="FIST_UI_DIR",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory of static UI assets to serve at /.",
)
@click.pass_obj
@fist_errors
def serve(state: CliState, addr: str, data_dir: Path | None, ui_dir: Path | None):
    """Run the HTTP JSON API (and the UI, when assets are present)."""
    import uvicorn

    from .service.app import create_app

    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.ClickException(f"--addr must be host:port, got {addr!r}")
    store = IncidentStore(data_dir) if data_dir is not None else state.store
    # Corpus problems must surface before the socket binds.
    app = create_app(state.corpus, store, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=int(port_text))


if __name__ == "__main__":
    main()
