"""Fraud incidents as ordered technique observations, plus coverage analytics.

An incident flow may revisit techniques (fraud loops back); coverage ratios
are set-based and therefore invariant under observation order. Reports
regroup observations by canonical phase order regardless of how the fraud
actually unfolded.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from pathlib import Path

from filelock import FileLock

from .canonical import canonical_json, format_timestamp, parse_timestamp
from .corpus import Corpus
from .errors import (
    DuplicateIncidentId,
    NotFound,
    PhaseMismatch,
    SchemaError,
    UnknownDetection,
    UnknownTechnique,
)
from .model import EntityId, EntityKind, format_entity_id, parse_entity_id

_INCIDENT_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]{0,99}")


@dataclass(frozen=True)
class TechniqueObservation:
    """One observed technique use: what, in which phase, and what fired."""

    technique_id: EntityId
    phase_id: EntityId
    observed_behavior: str
    detection_hits: frozenset[EntityId] = frozenset()
    sequence: int = 0
    observed_at: datetime | None = None


@dataclass(frozen=True)
class IncidentFlow:
    """Ordered technique observations for one fraud case."""

    incident_id: str
    title: str
    summary: str
    created_at: datetime
    observations: tuple[TechniqueObservation, ...] = ()


def check_incident_id(incident_id: str) -> str:
    """Incident ids double as file names, so the charset is restricted."""
    if not isinstance(incident_id, str) or _INCIDENT_ID_RE.fullmatch(incident_id) is None:
        raise SchemaError(
            "incident_id must be 1-100 chars of [A-Za-z0-9._-] starting alphanumeric, "
            f"got {incident_id!r}",
            subject=str(incident_id),
        )
    return incident_id


def annotate_incident(corpus: Corpus, flow: IncidentFlow) -> IncidentFlow:
    """Validate every observation against the corpus and renumber 1..N.

    A detection hit only has to exist in the corpus; hits on detections not
    pre-mapped to the technique are kept (novel indicators are data, not
    errors) and surfaced as unmapped in reports.
    """
    check_incident_id(flow.incident_id)
    annotated = []
    for position, obs in enumerate(flow.observations, start=1):
        technique = corpus.techniques.get(obs.technique_id)
        if technique is None:
            raise UnknownTechnique(
                f"observation {position}: technique "
                f"{format_entity_id(obs.technique_id)} not in corpus",
                subject=format_entity_id(obs.technique_id),
            )
        if obs.phase_id not in technique.phase_ids:
            raise PhaseMismatch(
                f"observation {position}: technique {format_entity_id(obs.technique_id)} "
                f"is not mapped to phase {format_entity_id(obs.phase_id)}",
                subject=format_entity_id(obs.technique_id),
            )
        for hit in sorted(obs.detection_hits):
            if hit not in corpus.detections:
                raise UnknownDetection(
                    f"observation {position}: detection {format_entity_id(hit)} "
                    "not in corpus",
                    subject=format_entity_id(hit),
                )
        annotated.append(replace(obs, sequence=position))
    return replace(flow, observations=tuple(annotated))


class GapReason(str, Enum):
    NO_MAPPED_DETECTION = "NoMappedDetection"
    NO_HIT_RECORDED = "NoHitRecorded"


@dataclass(frozen=True)
class GapEntry:
    technique_id: EntityId
    reason: GapReason


@dataclass(frozen=True)
class CoverageReport:
    """Kill-chain and detection coverage for one incident.

    phase_coverage       distinct phases observed / phases in the corpus
    detection_opportunity observed techniques with a mapped detection /
                          distinct observed techniques
    detection_realized   observed techniques with a recorded hit /
                          distinct observed techniques
    Empty flows score 0.0 across the board.
    """

    phase_coverage: float
    phases_hit: frozenset[EntityId]
    detection_opportunity: float
    detection_realized: float
    gaps: tuple[GapEntry, ...]

    def to_dict(self) -> dict:
        return {
            "phase_coverage": self.phase_coverage,
            "phases_hit": [format_entity_id(p) for p in sorted(self.phases_hit)],
            "detection_opportunity": self.detection_opportunity,
            "detection_realized": self.detection_realized,
            "gaps": [
                {
                    "technique_id": format_entity_id(g.technique_id),
                    "reason": g.reason.value,
                }
                for g in self.gaps
            ],
        }


def compute_coverage(corpus: Corpus, flow: IncidentFlow) -> CoverageReport:
    observed = {}
    phases_hit = set()
    hit_techniques = set()
    for obs in flow.observations:
        technique = corpus.techniques.get(obs.technique_id)
        if technique is None:
            raise UnknownTechnique(
                f"technique {format_entity_id(obs.technique_id)} not in corpus",
                subject=format_entity_id(obs.technique_id),
            )
        observed[obs.technique_id] = technique
        phases_hit.add(obs.phase_id)
        if obs.detection_hits:
            hit_techniques.add(obs.technique_id)

    mapped = {tid for tid, t in observed.items() if t.detection_ids}
    total_phases = len(corpus.phases)
    total_observed = len(observed)

    gaps = []
    for tid in sorted(observed):
        if tid not in mapped:
            gaps.append(GapEntry(tid, GapReason.NO_MAPPED_DETECTION))
        elif tid not in hit_techniques:
            gaps.append(GapEntry(tid, GapReason.NO_HIT_RECORDED))

    return CoverageReport(
        phase_coverage=len(phases_hit) / total_phases if total_phases else 0.0,
        phases_hit=frozenset(phases_hit),
        detection_opportunity=len(mapped) / total_observed if total_observed else 0.0,
        detection_realized=len(hit_techniques) / total_observed if total_observed else 0.0,
        gaps=tuple(gaps),
    )


class ReportFormat(str, Enum):
    MARKDOWN = "markdown"
    JSON = "json"


def render_report(
    corpus: Corpus,
    flow: IncidentFlow,
    report: CoverageReport,
    fmt: ReportFormat = ReportFormat.MARKDOWN,
) -> str:
    """Deterministic incident report: one section per phase, then metrics."""
    if fmt is ReportFormat.JSON:
        return canonical_json({"incident": flow_to_dict(flow), "coverage": report.to_dict()})

    lines = [f"# Incident Report: {flow.title}", ""]
    lines.append(f"- Incident: `{flow.incident_id}`")
    lines.append(f"- Created: {format_timestamp(flow.created_at)}")
    if flow.summary:
        lines += ["", flow.summary]

    for phase in sorted(corpus.phases.values(), key=lambda p: p.order):
        lines += ["", f"## {phase.name}", ""]
        section = [o for o in flow.observations if o.phase_id == phase.id]
        if not section:
            lines.append("No observations in this phase.")
            continue
        for obs in section:
            technique = corpus.techniques[obs.technique_id]
            lines.append(
                f"- {obs.sequence}. `{format_entity_id(obs.technique_id)}` "
                f"{technique.name}: {obs.observed_behavior}"
            )
            if obs.detection_hits:
                hits = []
                for hit in sorted(obs.detection_hits):
                    rendered = f"`{format_entity_id(hit)}`"
                    if hit not in technique.detection_ids:
                        rendered += " (unmapped)"
                    hits.append(rendered)
                lines.append(f"  - hits: {', '.join(hits)}")
            else:
                lines.append("  - hits: none recorded")

    lines += ["", "## Coverage", ""]
    lines.append(
        f"- Phase coverage: {report.phase_coverage:.4f} "
        f"({len(report.phases_hit)} of {len(corpus.phases)} phases)"
    )
    lines.append(f"- Detection opportunity: {report.detection_opportunity:.4f}")
    lines.append(f"- Detection realized: {report.detection_realized:.4f}")
    if report.gaps:
        lines.append("- Gaps:")
        for gap in report.gaps:
            lines.append(f"  - `{format_entity_id(gap.technique_id)}`: {gap.reason.value}")
    else:
        lines.append("- Gaps: none")
    return "\n".join(lines) + "\n"


# --- incident documents ------------------------------------------------------


def flow_to_dict(flow: IncidentFlow) -> dict:
    observations = []
    for obs in flow.observations:
        entry = {
            "sequence": obs.sequence,
            "technique": format_entity_id(obs.technique_id),
            "phase": format_entity_id(obs.phase_id),
            "observed_behavior": obs.observed_behavior,
            "detection_hits": [format_entity_id(h) for h in sorted(obs.detection_hits)],
        }
        if obs.observed_at is not None:
            entry["observed_at"] = format_timestamp(obs.observed_at)
        observations.append(entry)
    return {
        "incident_id": flow.incident_id,
        "title": flow.title,
        "summary": flow.summary,
        "created_at": format_timestamp(flow.created_at),
        "observations": observations,
    }


def flow_to_json(flow: IncidentFlow) -> str:
    return canonical_json(flow_to_dict(flow))


def flow_from_dict(document: dict) -> IncidentFlow:
    if not isinstance(document, dict):
        raise SchemaError("incident document must be a JSON object")
    expected = {"incident_id", "title", "summary", "created_at", "observations"}
    missing = expected - document.keys()
    unknown = document.keys() - expected
    if missing:
        raise SchemaError(f"incident document missing keys: {sorted(missing)}")
    if unknown:
        raise SchemaError(f"incident document has unknown keys: {sorted(unknown)}")
    incident_id = check_incident_id(document["incident_id"])
    title = document["title"]
    summary = document["summary"]
    if not isinstance(title, str) or not title:
        raise SchemaError("incident title must be a non-empty string")
    if not isinstance(summary, str):
        raise SchemaError("incident summary must be a string")
    created_at = parse_timestamp(document["created_at"])
    raw_observations = document["observations"]
    if not isinstance(raw_observations, list):
        raise SchemaError("observations must be an array")

    observations = []
    for index, raw in enumerate(raw_observations):
        where = f"observations[{index}]"
        observations.append(_observation_from_dict(raw, where))
    return IncidentFlow(
        incident_id=incident_id,
        title=title,
        summary=summary,
        created_at=created_at,
        observations=tuple(observations),
    )


def _observation_from_dict(raw, where: str) -> TechniqueObservation:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: observation must be an object")
    required = {"sequence", "technique", "phase", "observed_behavior", "detection_hits"}
    allowed = required | {"observed_at"}
    missing = required - raw.keys()
    unknown = raw.keys() - allowed
    if missing:
        raise SchemaError(f"{where}: missing fields {sorted(missing)}")
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")
    sequence = raw["sequence"]
    if isinstance(sequence, bool) or not isinstance(sequence, int) or sequence < 1:
        raise SchemaError(f"{where}.sequence: must be an integer >= 1")
    technique_id = _typed_id(raw["technique"], EntityKind.TECHNIQUE, f"{where}.technique")
    phase_id = _typed_id(raw["phase"], EntityKind.PHASE, f"{where}.phase")
    behavior = raw["observed_behavior"]
    if not isinstance(behavior, str):
        raise SchemaError(f"{where}.observed_behavior: must be a string")
    hits_raw = raw["detection_hits"]
    if not isinstance(hits_raw, list):
        raise SchemaError(f"{where}.detection_hits: must be an array")
    hits = frozenset(
        _typed_id(h, EntityKind.DETECTION, f"{where}.detection_hits[{i}]")
        for i, h in enumerate(hits_raw)
    )
    observed_at = None
    if "observed_at" in raw:
        observed_at = parse_timestamp(raw["observed_at"])
    return TechniqueObservation(
        technique_id=technique_id,
        phase_id=phase_id,
        observed_behavior=behavior,
        detection_hits=hits,
        sequence=sequence,
        observed_at=observed_at,
    )


def _typed_id(value, kind: EntityKind, where: str) -> EntityId:
    if not isinstance(value, str):
        raise SchemaError(f"{where}: must be an id string")
    parsed = parse_entity_id(value)
    if parsed.kind is not kind:
        raise SchemaError(f"{where}: expected a {kind.value} id, got {value!r}")
    return parsed


def flow_from_json(text: str) -> IncidentFlow:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return flow_from_dict(document)


# --- file-backed store -------------------------------------------------------


class IncidentStore:
    """One JSON document per incident under a data directory.

    Writes are serialized through an advisory lock per directory (single
    writer); documents are written atomically, so concurrent readers only
    ever see complete incidents.
    """

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(str(self.data_dir / ".fist-store.lock"))

    def _path(self, incident_id: str) -> Path:
        check_incident_id(incident_id)
        return self.data_dir / f"{incident_id}.json"

    def store(self, flow: IncidentFlow) -> None:
        """Persist a new incident; refuses to overwrite an existing id."""
        path = self._path(flow.incident_id)
        with self._lock:
            if path.exists():
                raise DuplicateIncidentId(
                    f"incident {flow.incident_id!r} already stored",
                    subject=flow.incident_id,
                )
            self._write(path, flow)

    def update(self, incident_id: str, mutate) -> IncidentFlow:
        """Read-modify-write an existing incident under the store lock.

        ``mutate`` maps the current flow to its replacement; if it raises,
        nothing is written.
        """
        path = self._path(incident_id)
        with self._lock:
            updated = mutate(self.load(incident_id))
            if updated.incident_id != incident_id:
                raise SchemaError(
                    "update must not change the incident id", subject=incident_id
                )
            self._write(path, updated)
            return updated

    def load(self, incident_id: str) -> IncidentFlow:
        path = self._path(incident_id)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFound(f"incident {incident_id!r} not stored", subject=incident_id) from None
        return flow_from_json(text)

    def list(self) -> list[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.json"))

    def _write(self, path: Path, flow: IncidentFlow) -> None:
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(flow_to_json(flow), encoding="utf-8")
        os.replace(tmp, path)
