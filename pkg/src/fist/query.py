"""Read-only corpus navigation: lookups, traversal, and the phase/tactic matrix.

All functions are pure over an immutable corpus and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus
from .errors import NotFound
from .model import (
    DetectionPattern,
    Entity,
    EntityId,
    EntityKind,
    Mitigation,
    Phase,
    Tactic,
    TechniqueEntry,
    ToolEntry,
    format_entity_id,
)


def get_entity(corpus: Corpus, entity_id: EntityId) -> Entity:
    entity = corpus.get(entity_id)
    if entity is None:
        raise NotFound(
            f"no {entity_id.kind.value} {format_entity_id(entity_id)} in corpus",
            subject=format_entity_id(entity_id),
        )
    return entity


def techniques_by_phase(corpus: Corpus, phase_id: EntityId) -> list[EntityId]:
    """Ids of all techniques mapped to the phase, in canonical id order."""
    if phase_id not in corpus.phases:
        raise NotFound(
            f"no phase {format_entity_id(phase_id)} in corpus",
            subject=format_entity_id(phase_id),
        )
    return sorted(t.id for t in corpus.techniques.values() if phase_id in t.phase_ids)


def detections_for_technique(corpus: Corpus, technique_id: EntityId) -> frozenset[EntityId]:
    technique = corpus.techniques.get(technique_id)
    if technique is None:
        raise NotFound(
            f"no technique {format_entity_id(technique_id)} in corpus",
            subject=format_entity_id(technique_id),
        )
    return technique.detection_ids


@dataclass(frozen=True)
class MatrixCell:
    tactic_id: EntityId
    technique_ids: tuple[EntityId, ...]


@dataclass(frozen=True)
class MatrixColumn:
    phase_id: EntityId
    cells: tuple[MatrixCell, ...]
    # Phase-linked techniques with no tactic inside this phase still belong
    # to the column; they land here so no technique drops out of the matrix.
    unassigned: tuple[EntityId, ...]


@dataclass(frozen=True)
class Matrix:
    columns: tuple[MatrixColumn, ...]
    orphan_tactics: tuple[EntityId, ...]


def build_matrix(corpus: Corpus) -> Matrix:
    """Phase columns in kill-chain order, techniques grouped per tactic."""
    phases = sorted(corpus.phases.values(), key=lambda p: p.order)
    used_tactics: set[EntityId] = set()
    columns = []
    for phase in phases:
        phase_tactics = sorted(
            t.id for t in corpus.tactics.values() if t.phase_id == phase.id
        )
        cells = []
        assigned: set[EntityId] = set()
        for tactic_id in phase_tactics:
            members = sorted(
                t.id
                for t in corpus.techniques.values()
                if phase.id in t.phase_ids and tactic_id in t.tactic_ids
            )
            if members:
                used_tactics.add(tactic_id)
                assigned.update(members)
            cells.append(MatrixCell(tactic_id=tactic_id, technique_ids=tuple(members)))
        unassigned = sorted(
            t.id
            for t in corpus.techniques.values()
            if phase.id in t.phase_ids and t.id not in assigned
        )
        columns.append(
            MatrixColumn(phase_id=phase.id, cells=tuple(cells), unassigned=tuple(unassigned))
        )
    for technique in corpus.techniques.values():
        used_tactics.update(technique.tactic_ids)
    orphans = sorted(t for t in corpus.tactics if t not in used_tactics)
    return Matrix(columns=tuple(columns), orphan_tactics=tuple(orphans))


def matrix_to_dict(corpus: Corpus, matrix: Matrix) -> dict:
    """JSON form consumed by the navigator UI."""
    columns = []
    for column in matrix.columns:
        phase = corpus.phases[column.phase_id]
        columns.append(
            {
                "phase": {
                    "id": format_entity_id(phase.id),
                    "name": phase.name,
                    "order": phase.order,
                },
                "cells": [
                    {
                        "tactic": _name_ref(corpus, cell.tactic_id),
                        "techniques": [_name_ref(corpus, t) for t in cell.technique_ids],
                    }
                    for cell in column.cells
                ],
                "unassigned": [_name_ref(corpus, t) for t in column.unassigned],
            }
        )
    return {
        "columns": columns,
        "orphan_tactics": [format_entity_id(t) for t in matrix.orphan_tactics],
    }


def _name_ref(corpus: Corpus, entity_id: EntityId) -> dict:
    entity = corpus.get(entity_id)
    ref = {"id": format_entity_id(entity_id), "name": entity.name if entity else None}
    if entity is not None and getattr(entity, "provisional", False):
        ref["provisional"] = True
    return ref


def entity_detail(corpus: Corpus, entity_id: EntityId) -> dict:
    """Entity record plus resolved relationships, for the API and CLI."""
    entity = get_entity(corpus, entity_id)
    detail: dict = {
        "kind": entity_id.kind.value,
        "id": format_entity_id(entity_id),
        "name": entity.name,
        "description": entity.description,
    }
    if isinstance(entity, Phase):
        detail["order"] = entity.order
        detail["techniques"] = _refs(corpus, techniques_by_phase(corpus, entity_id))
    elif isinstance(entity, Tactic):
        detail["provisional"] = entity.provisional
        detail["phase"] = _name_ref(corpus, entity.phase_id)
        detail["techniques"] = _refs(
            corpus,
            sorted(
                t.id for t in corpus.techniques.values() if entity_id in t.tactic_ids
            ),
        )
    elif isinstance(entity, TechniqueEntry):
        detail["provisional"] = entity.provisional
        if entity.parent is not None:
            detail["parent"] = format_entity_id(entity.parent)
        sub_ids = sorted(
            t.id
            for t in corpus.techniques.values()
            if t.parent is not None and t.parent == entity_id
        )
        if sub_ids:
            detail["sub_techniques"] = _refs(corpus, sub_ids)
        detail["phases"] = _refs(corpus, sorted(entity.phase_ids))
        detail["tactics"] = _refs(corpus, sorted(entity.tactic_ids))
        detail["detections"] = _refs(corpus, sorted(entity.detection_ids))
        detail["mitigations"] = _refs(corpus, sorted(entity.mitigation_ids))
        detail["tools"] = _refs(corpus, sorted(entity.tool_ids))
    elif isinstance(entity, DetectionPattern):
        detail["provisional"] = entity.provisional
        detail["signal_class"] = entity.signal_class.value
        if entity.parent is not None:
            detail["parent"] = format_entity_id(entity.parent)
        detail["techniques"] = _refs(
            corpus,
            sorted(
                t.id for t in corpus.techniques.values() if entity_id in t.detection_ids
            ),
        )
    elif isinstance(entity, (Mitigation, ToolEntry)):
        detail["provisional"] = entity.provisional
        detail["techniques"] = _refs(corpus, sorted(entity.technique_ids))
    return detail


def _refs(corpus: Corpus, ids) -> list[dict]:
    return [_name_ref(corpus, i) for i in ids]
