"""Corpus invariant checks and declared-scale verification.

Violations are data, not exceptions: both validators report exhaustively so
corpus authors can fix every problem in one pass. Results are deterministic
and independent of entity order in the source document.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from .model import ENTITY_CLASSES, EntityId, format_entity_id

# Violation codes, named after what broke.
DUPLICATE_ID = "DuplicateId"
DANGLING_REFERENCE = "DanglingReference"
MISSING_PARENT = "MissingParent"
PHASE_ORDER = "PhaseOrder"
MISSING_PHASE_LINK = "MissingPhaseLink"
TACTIC_PHASE_CONFLICT = "TacticPhaseConflict"


@dataclass(frozen=True)
class Violation:
    """One broken invariant, anchored to the entity it is about."""

    code: str
    subject: EntityId
    detail: str

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "subject": format_entity_id(self.subject),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class CountMismatch:
    """Declared manifest count disagreeing with actual corpus content."""

    entity_class: str
    declared: int
    actual: int

    def to_dict(self) -> dict:
        return {
            "entity_class": self.entity_class,
            "declared": self.declared,
            "actual": self.actual,
        }


def violations_jsonl(violations) -> str:
    """One JSON object per line, for CI pipelines."""
    return "".join(json.dumps(v.to_dict(), ensure_ascii=False) + "\n" for v in violations)


def _entity_lists(corpus_like) -> dict[str, list]:
    """Accept either a CorpusDraft (lists) or a frozen Corpus (mappings)."""
    lists = {}
    for cls in ENTITY_CLASSES:
        section = getattr(corpus_like, cls)
        lists[cls] = list(section.values()) if hasattr(section, "values") else list(section)
    return lists


def validate_integrity(corpus_like) -> list[Violation]:
    """Check every structural invariant; empty list means the corpus is sound.

    Checks: unique ids, resolvable cross-references, parents present for all
    sub-entities, contiguous phase ordering, phase links on every cataloged
    technique, and tactic/technique phase agreement.
    """
    sections = _entity_lists(corpus_like)
    declared: dict[str, set[EntityId]] = {
        cls: {e.id for e in entities} for cls, entities in sections.items()
    }
    found: list[Violation] = []

    for cls, entities in sections.items():
        for entity_id, count in sorted(Counter(e.id for e in entities).items()):
            if count > 1:
                found.append(
                    Violation(
                        DUPLICATE_ID,
                        entity_id,
                        f"id appears {count} times in section {cls!r}",
                    )
                )

    def check_refs(entity_id: EntityId, refs, target_cls: str):
        for ref in sorted(refs):
            if ref not in declared[target_cls]:
                found.append(
                    Violation(
                        DANGLING_REFERENCE,
                        entity_id,
                        f"references missing {target_cls[:-1]} {format_entity_id(ref)}",
                    )
                )

    for tactic in sections["tactics"]:
        check_refs(tactic.id, [tactic.phase_id], "phases")
    for technique in sections["techniques"]:
        check_refs(technique.id, technique.phase_ids, "phases")
        check_refs(technique.id, technique.tactic_ids, "tactics")
        check_refs(technique.id, technique.detection_ids, "detections")
        check_refs(technique.id, technique.mitigation_ids, "mitigations")
        check_refs(technique.id, technique.tool_ids, "tools")
    for mitigation in sections["mitigations"]:
        check_refs(mitigation.id, mitigation.technique_ids, "techniques")
    for tool in sections["tools"]:
        check_refs(tool.id, tool.technique_ids, "techniques")

    for cls in ("techniques", "detections"):
        for entity in sections[cls]:
            parent = entity.id.parent
            if parent is not None and parent not in declared[cls]:
                found.append(
                    Violation(
                        MISSING_PARENT,
                        entity.id,
                        f"parent {format_entity_id(parent)} not in corpus",
                    )
                )

    found.extend(_check_phase_order(sections["phases"]))

    for technique in sections["techniques"]:
        if not technique.provisional and not technique.phase_ids:
            found.append(
                Violation(MISSING_PHASE_LINK, technique.id, "technique maps to no phase")
            )

    # A tactic whose own phase dangles already got a DanglingReference;
    # reporting phase conflicts against it would only be noise.
    tactic_phases: dict[EntityId, set[EntityId]] = {}
    for tactic in sections["tactics"]:
        if tactic.phase_id in declared["phases"]:
            tactic_phases.setdefault(tactic.id, set()).add(tactic.phase_id)
    for technique in sections["techniques"]:
        for tactic_id in sorted(technique.tactic_ids):
            for phase_id in sorted(tactic_phases.get(tactic_id, ())):
                if phase_id not in technique.phase_ids:
                    found.append(
                        Violation(
                            TACTIC_PHASE_CONFLICT,
                            technique.id,
                            f"linked tactic {format_entity_id(tactic_id)} belongs to "
                            f"phase {format_entity_id(phase_id)}, which the technique "
                            "does not map to",
                        )
                    )

    # Duplicate entries are checked once per id above; everything else was
    # evaluated per entry, so shuffling the document cannot change the result.
    return _deduplicated(found)


def _check_phase_order(phases) -> list[Violation]:
    expected = set(range(1, len(phases) + 1))
    order_counts = Counter(p.order for p in phases)
    found = []
    for phase in sorted(phases, key=lambda p: (p.id.sort_key(), p.order)):
        if order_counts[phase.order] > 1:
            found.append(
                Violation(
                    PHASE_ORDER,
                    phase.id,
                    f"order {phase.order} is shared by {order_counts[phase.order]} phases",
                )
            )
        elif phase.order not in expected:
            found.append(
                Violation(
                    PHASE_ORDER,
                    phase.id,
                    f"order {phase.order} outside contiguous 1..{len(phases)}",
                )
            )
    return found


def _deduplicated(found: list[Violation]) -> list[Violation]:
    unique = sorted(set(found), key=lambda v: (v.subject.sort_key(), v.code, v.detail))
    return unique


def validate_manifest(corpus_like, manifest=None) -> list[CountMismatch]:
    """Compare declared scale against actual content, class by class.

    Counts exclude provisional placeholder entries. ``manifest`` overrides
    the corpus's own declaration, for checking content against an external
    scale claim.
    """
    manifest = manifest if manifest is not None else corpus_like.manifest
    sections = _entity_lists(corpus_like)
    mismatches = []
    for cls in ENTITY_CLASSES:
        actual_ids = {
            e.id for e in sections[cls] if not getattr(e, "provisional", False)
        }
        declared_count = getattr(manifest, cls)
        if declared_count != len(actual_ids):
            mismatches.append(
                CountMismatch(entity_class=cls, declared=declared_count, actual=len(actual_ids))
            )
    return mismatches
