"""Interchange exports: STIX-style bundles, navigator layers, cross-framework maps.

Exports are deterministic: object identifiers are namespace-hashed from the
corpus digest and entity id, and objects are emitted in sorted order, so
identical inputs always serialize to identical bytes (diffable exports).

Provisional placeholder entries (parent groups, stand-in tactics) never
leave the corpus; only cataloged content is exported.
"""

from __future__ import annotations

import csv
import io
import uuid
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .canonical import canonical_json, format_timestamp
from .corpus import Corpus
from .errors import IntegrityError, SchemaError
from .incident import IncidentFlow
from .model import EntityId, format_entity_id, parse_entity_id

_ID_NAMESPACE = uuid.uuid5(uuid.NAMESPACE_URL, "x-fist-interchange")

KILL_CHAIN_NAME = "fist"


def _stix_id(stix_type: str, digest: str, key: str) -> str:
    return f"{stix_type}--{uuid.uuid5(_ID_NAMESPACE, f'{digest}/{key}')}"


def export_stix_bundle(corpus: Corpus, flows: Sequence[IncidentFlow] = ()) -> dict:
    """Bundle of the cataloged corpus plus one report object per incident.

    Techniques become ``attack-pattern`` objects carrying their kill-chain
    placement; detections become custom ``x-fist-detection`` objects with a
    ``detects`` relationship, mitigations ``course-of-action`` with
    ``mitigates``, tools ``tool`` with ``uses``. Every relationship endpoint
    is included in the bundle (referential closure).
    """
    digest = corpus.source_digest
    objects: list[dict] = []

    identity_id = _stix_id("identity", digest, "identity")
    objects.append(
        {
            "type": "identity",
            "spec_version": "2.1",
            "id": identity_id,
            "name": "FIST knowledge base",
            "identity_class": "system",
            "x_fist_corpus_version": corpus.manifest.corpus_version,
            "x_fist_corpus_digest": digest,
        }
    )

    observed: set[EntityId] = set()
    for flow in flows:
        observed.update(o.technique_id for o in flow.observations)

    # Cataloged techniques, plus anything an incident observed, so report
    # references always close.
    exported_techniques = sorted(
        t.id
        for t in corpus.techniques.values()
        if not t.provisional or t.id in observed
    )
    technique_ids = {}
    for tid in exported_techniques:
        technique = corpus.techniques[tid]
        ap_id = _stix_id("attack-pattern", digest, f"entity/{format_entity_id(tid)}")
        technique_ids[tid] = ap_id
        phases = sorted(
            (corpus.phases[p] for p in technique.phase_ids if p in corpus.phases),
            key=lambda p: p.order,
        )
        objects.append(
            {
                "type": "attack-pattern",
                "spec_version": "2.1",
                "id": ap_id,
                "name": technique.name,
                "description": technique.description,
                "external_references": [
                    {"source_name": "fist", "external_id": format_entity_id(tid)}
                ],
                "kill_chain_phases": [
                    {"kill_chain_name": KILL_CHAIN_NAME, "phase_name": p.name.lower()}
                    for p in phases
                ],
            }
        )

    detection_ids = {}
    for detection in sorted(corpus.detections.values(), key=lambda d: d.id.sort_key()):
        if detection.provisional:
            continue
        det_id = _stix_id(
            "x-fist-detection", digest, f"entity/{format_entity_id(detection.id)}"
        )
        detection_ids[detection.id] = det_id
        objects.append(
            {
                "type": "x-fist-detection",
                "spec_version": "2.1",
                "id": det_id,
                "name": detection.name,
                "description": detection.description,
                "x_fist_signal_class": detection.signal_class.value,
                "external_references": [
                    {"source_name": "fist", "external_id": format_entity_id(detection.id)}
                ],
            }
        )

    def relationship(rel_type: str, source: str, target: str, key: str) -> dict:
        return {
            "type": "relationship",
            "spec_version": "2.1",
            "id": _stix_id("relationship", digest, f"rel/{key}"),
            "relationship_type": rel_type,
            "source_ref": source,
            "target_ref": target,
        }

    for tid in exported_techniques:
        technique = corpus.techniques[tid]
        for det in sorted(technique.detection_ids):
            if det in detection_ids:
                objects.append(
                    relationship(
                        "detects",
                        detection_ids[det],
                        technique_ids[tid],
                        f"detects/{format_entity_id(det)}/{format_entity_id(tid)}",
                    )
                )

    for mitigation in sorted(corpus.mitigations.values(), key=lambda m: m.id.sort_key()):
        if mitigation.provisional:
            continue
        coa_id = _stix_id(
            "course-of-action", digest, f"entity/{format_entity_id(mitigation.id)}"
        )
        objects.append(
            {
                "type": "course-of-action",
                "spec_version": "2.1",
                "id": coa_id,
                "name": mitigation.name,
                "description": mitigation.description,
                "external_references": [
                    {"source_name": "fist", "external_id": format_entity_id(mitigation.id)}
                ],
            }
        )
        for tid in sorted(mitigation.technique_ids):
            if tid in technique_ids:
                objects.append(
                    relationship(
                        "mitigates",
                        coa_id,
                        technique_ids[tid],
                        f"mitigates/{format_entity_id(mitigation.id)}/{format_entity_id(tid)}",
                    )
                )

    for tool in sorted(corpus.tools.values(), key=lambda t: t.id.sort_key()):
        if tool.provisional:
            continue
        tool_obj_id = _stix_id("tool", digest, f"entity/{format_entity_id(tool.id)}")
        objects.append(
            {
                "type": "tool",
                "spec_version": "2.1",
                "id": tool_obj_id,
                "name": tool.name,
                "description": tool.description,
                "external_references": [
                    {"source_name": "fist", "external_id": format_entity_id(tool.id)}
                ],
            }
        )
        for tid in sorted(tool.technique_ids):
            if tid in technique_ids:
                objects.append(
                    relationship(
                        "uses",
                        tool_obj_id,
                        technique_ids[tid],
                        f"uses/{format_entity_id(tool.id)}/{format_entity_id(tid)}",
                    )
                )

    for flow in flows:
        flow_techniques = sorted({o.technique_id for o in flow.observations})
        objects.append(
            {
                "type": "report",
                "spec_version": "2.1",
                "id": _stix_id("report", digest, f"report/{flow.incident_id}"),
                "name": flow.title,
                "description": flow.summary,
                "published": format_timestamp(flow.created_at),
                "report_types": ["threat-report"],
                "created_by_ref": identity_id,
                "object_refs": [technique_ids[t] for t in flow_techniques],
            }
        )

    objects.sort(key=lambda obj: (obj["type"], obj["id"]))
    bundle_key = "bundle/" + ",".join(flow.incident_id for flow in flows)
    return {
        "type": "bundle",
        "id": _stix_id("bundle", digest, bundle_key),
        "spec_version": "2.1",
        "objects": objects,
    }


def bundle_to_json(bundle: dict) -> str:
    return canonical_json(bundle)


# --- navigator layers --------------------------------------------------------

LAYER_SCORE_HIT = 100
LAYER_SCORE_OBSERVED = 40


@dataclass(frozen=True)
class LayerEntry:
    technique_id: EntityId
    score: int
    comment: str


@dataclass(frozen=True)
class LayerDocument:
    """Technique score/comment overlay exchanged with the navigator UI."""

    name: str
    corpus_version: str
    entries: tuple[LayerEntry, ...]


def export_layer(corpus: Corpus, flow: IncidentFlow) -> LayerDocument:
    """One entry per distinct observed technique; hits score 100, else 40."""
    first_behavior: dict[EntityId, str] = {}
    has_hit: dict[EntityId, bool] = {}
    for obs in sorted(flow.observations, key=lambda o: o.sequence):
        first_behavior.setdefault(obs.technique_id, obs.observed_behavior)
        has_hit[obs.technique_id] = has_hit.get(obs.technique_id, False) or bool(
            obs.detection_hits
        )
    entries = tuple(
        LayerEntry(
            technique_id=tid,
            score=_clamp_score(
                LAYER_SCORE_HIT if has_hit[tid] else LAYER_SCORE_OBSERVED
            ),
            comment=first_behavior[tid],
        )
        for tid in sorted(first_behavior)
    )
    return LayerDocument(
        name=f"Incident {flow.incident_id} coverage",
        corpus_version=corpus.manifest.corpus_version,
        entries=entries,
    )


def _clamp_score(score: int) -> int:
    return max(0, min(100, score))


def layer_to_dict(layer: LayerDocument) -> dict:
    return {
        "name": layer.name,
        "corpus_version": layer.corpus_version,
        "entries": [
            {
                "technique_id": format_entity_id(e.technique_id),
                "score": e.score,
                "comment": e.comment,
            }
            for e in layer.entries
        ],
    }


def layer_to_json(layer: LayerDocument) -> str:
    return canonical_json(layer_to_dict(layer))


# --- cross-framework mappings -------------------------------------------------


class CrossFramework(str, Enum):
    ATTACK = "ATTACK"
    DISARM = "DISARM"


class MapRelation(str, Enum):
    EQUIVALENT = "Equivalent"
    BROADER = "Broader"
    NARROWER = "Narrower"
    RELATED = "Related"


@dataclass(frozen=True)
class CrossMapping:
    fist_id: EntityId
    framework: CrossFramework
    external_id: str
    relation: MapRelation


CROSSMAP_HEADER = ["fist_id", "framework", "external_id", "relation"]


def load_crossmap(source: str | Path, corpus: Corpus) -> tuple[CrossMapping, ...]:
    """Parse a crossmap CSV and verify every fist_id resolves in the corpus."""
    text = source.read_text(encoding="utf-8") if isinstance(source, Path) else source
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or rows[0] != CROSSMAP_HEADER:
        raise SchemaError(
            f"crossmap header must be {','.join(CROSSMAP_HEADER)!r}"
        )
    mappings = []
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise SchemaError(f"crossmap line {number}: expected 4 columns, got {len(row)}")
        raw_id, raw_framework, external_id, raw_relation = row
        fist_id = parse_entity_id(raw_id)
        try:
            framework = CrossFramework(raw_framework)
        except ValueError:
            raise SchemaError(
                f"crossmap line {number}: unknown framework {raw_framework!r}"
            ) from None
        try:
            relation = MapRelation(raw_relation)
        except ValueError:
            raise SchemaError(
                f"crossmap line {number}: unknown relation {raw_relation!r}"
            ) from None
        if not external_id:
            raise SchemaError(f"crossmap line {number}: external_id must be non-empty")
        if corpus.get(fist_id) is None:
            raise IntegrityError(
                f"crossmap line {number}: {format_entity_id(fist_id)} not in corpus",
                subject=format_entity_id(fist_id),
            )
        mappings.append(
            CrossMapping(
                fist_id=fist_id,
                framework=framework,
                external_id=external_id,
                relation=relation,
            )
        )
    return tuple(mappings)


def resolve_external(
    crossmap: Iterable[CrossMapping], external_id: str
) -> list[EntityId]:
    """Reverse lookup: all FIST ids mapped to the given external id."""
    return sorted({m.fist_id for m in crossmap if m.external_id == external_id})
