"""Read and write corpus documents; construct immutable Corpus values.

A corpus document is a single UTF-8 JSON object with the seven top-level
keys ``manifest``, ``phases``, ``tactics``, ``techniques``, ``detections``,
``mitigations`` and ``tools`` (see ``docs/corpus.schema.json``). A YAML
front-end is accepted for file loads and converted to the same model.

Loading is atomic: a document that fails any schema or integrity check
yields no partial corpus. Saving is canonical: entities are ordered by id,
field order is fixed, and output bytes are deterministic, which makes the
content digest a stable corpus version.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

import yaml

from .canonical import canonical_json
from .errors import IntegrityError, ScaleDrift, SchemaError
from .model import (
    ENTITY_CLASSES,
    DetectionPattern,
    Entity,
    EntityId,
    EntityKind,
    Manifest,
    Mitigation,
    Phase,
    SignalClass,
    Tactic,
    TechniqueEntry,
    ToolEntry,
    format_entity_id,
    parse_entity_id,
)

_SECTION_KIND = {
    "phases": EntityKind.PHASE,
    "tactics": EntityKind.TACTIC,
    "techniques": EntityKind.TECHNIQUE,
    "detections": EntityKind.DETECTION,
    "mitigations": EntityKind.MITIGATION,
    "tools": EntityKind.TOOL,
}


@dataclass
class CorpusDraft:
    """Pre-validation form of a corpus: entity lists, duplicates and all."""

    manifest: Manifest
    phases: list[Phase] = field(default_factory=list)
    tactics: list[Tactic] = field(default_factory=list)
    techniques: list[TechniqueEntry] = field(default_factory=list)
    detections: list[DetectionPattern] = field(default_factory=list)
    mitigations: list[Mitigation] = field(default_factory=list)
    tools: list[ToolEntry] = field(default_factory=list)


@dataclass(frozen=True, eq=True)
class Corpus:
    """Immutable, fully linked knowledge base keyed by entity id."""

    manifest: Manifest
    phases: Mapping[EntityId, Phase]
    tactics: Mapping[EntityId, Tactic]
    techniques: Mapping[EntityId, TechniqueEntry]
    detections: Mapping[EntityId, DetectionPattern]
    mitigations: Mapping[EntityId, Mitigation]
    tools: Mapping[EntityId, ToolEntry]
    source_digest: str

    def section(self, kind: EntityKind) -> Mapping[EntityId, Entity]:
        return {
            EntityKind.PHASE: self.phases,
            EntityKind.TACTIC: self.tactics,
            EntityKind.TECHNIQUE: self.techniques,
            EntityKind.DETECTION: self.detections,
            EntityKind.MITIGATION: self.mitigations,
            EntityKind.TOOL: self.tools,
        }[kind]

    def get(self, entity_id: EntityId) -> Entity | None:
        return self.section(entity_id.kind).get(entity_id)

    def entities(self) -> Iterator[Entity]:
        for cls in ENTITY_CLASSES:
            yield from getattr(self, cls).values()

    def catalog_counts(self) -> dict[str, int]:
        """Entity counts per class, excluding provisional placeholders.

        Provisional entries (parent groups and stand-in tactics kept only so
        cross-references resolve) are structural glue, not catalog content,
        so they do not count against the declared scale.
        """
        counts = {}
        for cls in ENTITY_CLASSES:
            values = getattr(self, cls).values()
            counts[cls] = sum(1 for e in values if not getattr(e, "provisional", False))
        return counts


def build_corpus(
    draft: CorpusDraft, *, validate: bool = True, allow_scale_drift: bool = False
) -> Corpus:
    """Freeze a draft into a Corpus, failing atomically on any violation."""
    from . import validator

    if validate:
        violations = validator.validate_integrity(draft)
        if violations:
            first = violations[0]
            raise IntegrityError(
                f"{len(violations)} integrity violation(s), first: {first.code} "
                f"{format_entity_id(first.subject)}: {first.detail}",
                subject=format_entity_id(first.subject),
                violations=violations,
            )

    sections: dict[str, dict[EntityId, Entity]] = {}
    for cls in ENTITY_CLASSES:
        by_id: dict[EntityId, Entity] = {}
        for entity in getattr(draft, cls):
            by_id.setdefault(entity.id, entity)
        sections[cls] = by_id

    digest_basis = _document_dict(draft.manifest, sections)
    digest = hashlib.sha256(canonical_json(digest_basis).encode("utf-8")).hexdigest()
    corpus = Corpus(manifest=draft.manifest, source_digest=digest, **sections)

    if validate and not allow_scale_drift:
        mismatches = validator.validate_manifest(corpus)
        if mismatches:
            summary = "; ".join(
                f"{m.entity_class} declared {m.declared} != actual {m.actual}"
                for m in mismatches
            )
            raise ScaleDrift(f"manifest scale drift: {summary}", mismatches=mismatches)
    return corpus


def load_corpus(source, *, allow_scale_drift: bool = False) -> Corpus:
    """Load a corpus from a dict, JSON text, or file path.

    Raises :class:`SchemaError` on shape problems, :class:`MalformedId` on
    bad identifiers, :class:`IntegrityError` on referential violations, and
    :class:`ScaleDrift` on manifest/content count disagreement (suppressed
    with ``allow_scale_drift=True``).
    """
    document = read_document(source)
    draft = parse_document(document)
    return build_corpus(draft, validate=True, allow_scale_drift=allow_scale_drift)


def save_corpus(corpus: Corpus) -> str:
    """Canonical serialization: id-ordered entities, stable fields, stable bytes."""
    sections = {cls: getattr(corpus, cls) for cls in ENTITY_CLASSES}
    return canonical_json(_document_dict(corpus.manifest, sections))


def corpus_document(corpus: Corpus) -> dict:
    """The canonical document as a plain dict (what ``save_corpus`` serializes)."""
    sections = {cls: getattr(corpus, cls) for cls in ENTITY_CLASSES}
    return _document_dict(corpus.manifest, sections)


@dataclass(frozen=True)
class ChangeSet:
    """Exact partition of entity ids differing between two corpora."""

    added: frozenset[EntityId]
    removed: frozenset[EntityId]
    modified: frozenset[EntityId]


def diff_corpora(old: Corpus, new: Corpus) -> ChangeSet:
    old_entities = {e.id: e for e in old.entities()}
    new_entities = {e.id: e for e in new.entities()}
    old_ids = set(old_entities)
    new_ids = set(new_entities)
    modified = {
        eid for eid in old_ids & new_ids if old_entities[eid] != new_entities[eid]
    }
    return ChangeSet(
        added=frozenset(new_ids - old_ids),
        removed=frozenset(old_ids - new_ids),
        modified=frozenset(modified),
    )


# --- document reading -------------------------------------------------------


def read_document(source) -> dict:
    if isinstance(source, dict):
        return source
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
        if source.suffix.lower() in (".yaml", ".yml"):
            try:
                document = yaml.safe_load(text)
            except yaml.YAMLError as exc:
                raise SchemaError(f"invalid YAML: {exc}") from exc
        else:
            document = _parse_json(text)
        if not isinstance(document, dict):
            raise SchemaError("corpus document must be a JSON object")
        return document
    if isinstance(source, (str, bytes)):
        document = _parse_json(source)
        if not isinstance(document, dict):
            raise SchemaError("corpus document must be a JSON object")
        return document
    raise SchemaError(f"unsupported corpus source type: {type(source).__name__}")


def _parse_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc


def parse_document(document: dict) -> CorpusDraft:
    """Shape-check a raw document and build typed entity lists."""
    if not isinstance(document, dict):
        raise SchemaError("corpus document must be a JSON object")
    expected = {"manifest", *ENTITY_CLASSES}
    missing = expected - document.keys()
    unknown = document.keys() - expected
    if missing:
        raise SchemaError(f"corpus document missing keys: {sorted(missing)}")
    if unknown:
        raise SchemaError(f"corpus document has unknown keys: {sorted(unknown)}")

    manifest = _parse_manifest(document["manifest"])
    draft = CorpusDraft(manifest=manifest)
    parsers = {
        "phases": _parse_phase,
        "tactics": _parse_tactic,
        "techniques": _parse_technique,
        "detections": _parse_detection,
        "mitigations": _parse_mitigation,
        "tools": _parse_tool,
    }
    for cls in ENTITY_CLASSES:
        section = document[cls]
        if not isinstance(section, list):
            raise SchemaError(f"section {cls!r} must be an array")
        for index, raw in enumerate(section):
            where = f"{cls}[{index}]"
            if not isinstance(raw, dict):
                raise SchemaError(f"{where}: entity must be an object")
            getattr(draft, cls).append(parsers[cls](raw, where))
    return draft


def _parse_manifest(raw) -> Manifest:
    if not isinstance(raw, dict):
        raise SchemaError("manifest must be an object")
    expected = {"corpus_version", *ENTITY_CLASSES}
    missing = expected - raw.keys()
    unknown = raw.keys() - expected
    if missing:
        raise SchemaError(f"manifest missing keys: {sorted(missing)}")
    if unknown:
        raise SchemaError(f"manifest has unknown keys: {sorted(unknown)}")
    version = raw["corpus_version"]
    if not isinstance(version, str) or not version:
        raise SchemaError("manifest corpus_version must be a non-empty string")
    counts = {}
    for cls in ENTITY_CLASSES:
        value = raw[cls]
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"manifest count {cls!r} must be an integer")
        counts[cls] = value
    return Manifest(corpus_version=version, **counts)


def _take(raw: dict, where: str, required: dict, optional: dict | None = None) -> dict:
    optional = optional or {}
    expected = required.keys() | optional.keys()
    missing = required.keys() - raw.keys()
    unknown = raw.keys() - expected
    if missing:
        raise SchemaError(f"{where}: missing fields {sorted(missing)}")
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")
    values = {}
    for name, check in required.items():
        values[name] = check(raw[name], f"{where}.{name}")
    for name, (default, check) in optional.items():
        values[name] = check(raw[name], f"{where}.{name}") if name in raw else default
    return values


def _string(value, where, allow_empty=False) -> str:
    if not isinstance(value, str) or (not allow_empty and not value):
        raise SchemaError(f"{where}: must be a non-empty string")
    return value


def _text(value, where) -> str:
    return _string(value, where, allow_empty=True)


def _bool(value, where) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(f"{where}: must be a boolean")
    return value


def _entity_id(value, where, kind: EntityKind) -> EntityId:
    text = _string(value, where)
    parsed = parse_entity_id(text)
    if parsed.kind is not kind:
        raise SchemaError(f"{where}: expected a {kind.value} id, got {text!r}")
    return parsed


def _id_set(value, where, kind: EntityKind) -> frozenset[EntityId]:
    if not isinstance(value, list):
        raise SchemaError(f"{where}: must be an array of ids")
    return frozenset(
        _entity_id(item, f"{where}[{i}]", kind) for i, item in enumerate(value)
    )


def _parse_phase(raw: dict, where: str) -> Phase:
    values = _take(
        raw,
        where,
        required={
            "id": lambda v, w: _entity_id(v, w, EntityKind.PHASE),
            "name": _string,
            "description": _text,
            "order": _order,
        },
    )
    return Phase(**values)


def _order(value, where) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise SchemaError(f"{where}: must be an integer >= 1")
    return value


def _parse_tactic(raw: dict, where: str) -> Tactic:
    values = _take(
        raw,
        where,
        required={
            "id": lambda v, w: _entity_id(v, w, EntityKind.TACTIC),
            "name": _string,
            "description": _text,
            "phase": lambda v, w: _entity_id(v, w, EntityKind.PHASE),
        },
        optional={"provisional": (False, _bool)},
    )
    values["phase_id"] = values.pop("phase")
    return Tactic(**values)


def _parse_technique(raw: dict, where: str) -> TechniqueEntry:
    values = _take(
        raw,
        where,
        required={
            "id": lambda v, w: _entity_id(v, w, EntityKind.TECHNIQUE),
            "name": _string,
            "description": _text,
        },
        optional={
            "phases": (frozenset(), lambda v, w: _id_set(v, w, EntityKind.PHASE)),
            "tactics": (frozenset(), lambda v, w: _id_set(v, w, EntityKind.TACTIC)),
            "detections": (frozenset(), lambda v, w: _id_set(v, w, EntityKind.DETECTION)),
            "mitigations": (frozenset(), lambda v, w: _id_set(v, w, EntityKind.MITIGATION)),
            "tools": (frozenset(), lambda v, w: _id_set(v, w, EntityKind.TOOL)),
            "provisional": (False, _bool),
        },
    )
    return TechniqueEntry(
        id=values["id"],
        name=values["name"],
        description=values["description"],
        phase_ids=values["phases"],
        tactic_ids=values["tactics"],
        detection_ids=values["detections"],
        mitigation_ids=values["mitigations"],
        tool_ids=values["tools"],
        provisional=values["provisional"],
    )


def _parse_detection(raw: dict, where: str) -> DetectionPattern:
    values = _take(
        raw,
        where,
        required={
            "id": lambda v, w: _entity_id(v, w, EntityKind.DETECTION),
            "name": _string,
            "description": _text,
            "signal_class": _signal_class,
        },
        optional={"provisional": (False, _bool)},
    )
    return DetectionPattern(**values)


def _signal_class(value, where) -> SignalClass:
    text = _string(value, where)
    try:
        return SignalClass(text)
    except ValueError:
        choices = ", ".join(s.value for s in SignalClass)
        raise SchemaError(f"{where}: must be one of {choices}, got {text!r}") from None


def _parse_mitigation(raw: dict, where: str) -> Mitigation:
    values = _linked_entry(raw, where, EntityKind.MITIGATION)
    return Mitigation(**values)


def _parse_tool(raw: dict, where: str) -> ToolEntry:
    values = _linked_entry(raw, where, EntityKind.TOOL)
    return ToolEntry(**values)


def _linked_entry(raw: dict, where: str, kind: EntityKind) -> dict:
    values = _take(
        raw,
        where,
        required={
            "id": lambda v, w: _entity_id(v, w, kind),
            "name": _string,
            "description": _text,
        },
        optional={
            "techniques": (frozenset(), lambda v, w: _id_set(v, w, EntityKind.TECHNIQUE)),
            "provisional": (False, _bool),
        },
    )
    values["technique_ids"] = values.pop("techniques")
    return values


# --- document writing -------------------------------------------------------


def _ids(id_set: frozenset[EntityId]) -> list[str]:
    return [format_entity_id(i) for i in sorted(id_set)]


def _document_dict(manifest: Manifest, sections: dict[str, Mapping[EntityId, Entity]]) -> dict:
    document: dict = {
        "manifest": {"corpus_version": manifest.corpus_version, **manifest.counts()}
    }
    writers = {
        "phases": _phase_dict,
        "tactics": _tactic_dict,
        "techniques": _technique_dict,
        "detections": _detection_dict,
        "mitigations": _linked_dict,
        "tools": _linked_dict,
    }
    for cls in ENTITY_CLASSES:
        entities = sorted(sections[cls].values(), key=lambda e: e.id.sort_key())
        document[cls] = [writers[cls](e) for e in entities]
    return document


def _phase_dict(phase: Phase) -> dict:
    return {
        "id": format_entity_id(phase.id),
        "name": phase.name,
        "description": phase.description,
        "order": phase.order,
    }


def _tactic_dict(tactic: Tactic) -> dict:
    return {
        "id": format_entity_id(tactic.id),
        "name": tactic.name,
        "description": tactic.description,
        "phase": format_entity_id(tactic.phase_id),
        "provisional": tactic.provisional,
    }


def _technique_dict(technique: TechniqueEntry) -> dict:
    return {
        "id": format_entity_id(technique.id),
        "name": technique.name,
        "description": technique.description,
        "phases": _ids(technique.phase_ids),
        "tactics": _ids(technique.tactic_ids),
        "detections": _ids(technique.detection_ids),
        "mitigations": _ids(technique.mitigation_ids),
        "tools": _ids(technique.tool_ids),
        "provisional": technique.provisional,
    }


def _detection_dict(detection: DetectionPattern) -> dict:
    return {
        "id": format_entity_id(detection.id),
        "name": detection.name,
        "description": detection.description,
        "signal_class": detection.signal_class.value,
        "provisional": detection.provisional,
    }


def _linked_dict(entry: Mitigation | ToolEntry) -> dict:
    return {
        "id": format_entity_id(entry.id),
        "name": entry.name,
        "description": entry.description,
        "techniques": _ids(entry.technique_ids),
        "provisional": entry.provisional,
    }
