"""Deterministic synthetic corpora for scale validation and demos.

The generated content is obviously synthetic (every name says so); it exists
so declared-scale checks can be exercised at sizes the curated catalog does
not ship.
"""

from __future__ import annotations

from .corpus import Corpus, CorpusDraft, build_corpus
from .errors import SchemaError
from .model import (
    DetectionPattern,
    EntityId,
    EntityKind,
    Manifest,
    Mitigation,
    Phase,
    SignalClass,
    Tactic,
    TechniqueEntry,
    ToolEntry,
)

# Families below 100 are reserved for curated content; synthetic entries
# start at 101 so the two can coexist in examples.
_FAMILY_BASE = 101


def generate_scale_corpus(manifest: Manifest) -> Corpus:
    """Build a valid corpus whose actual counts equal the manifest exactly."""
    if manifest.tactics and not manifest.phases:
        raise SchemaError("cannot generate tactics for a corpus with no phases")
    if manifest.techniques and not manifest.phases:
        raise SchemaError("cannot generate techniques for a corpus with no phases")

    phases = [
        Phase(
            id=EntityId(EntityKind.PHASE, index),
            name=f"Synthetic Phase {index}",
            description="Generated placeholder phase.",
            order=index,
        )
        for index in range(1, manifest.phases + 1)
    ]
    tactics = [
        Tactic(
            id=EntityId(EntityKind.TACTIC, index),
            name=f"Synthetic Tactic {index}",
            description="Generated placeholder tactic.",
            phase_id=phases[(index - 1) % len(phases)].id,
        )
        for index in range(1, manifest.tactics + 1)
    ]
    tactics_by_phase: dict[EntityId, list[Tactic]] = {}
    for tactic in tactics:
        tactics_by_phase.setdefault(tactic.phase_id, []).append(tactic)

    detections = [
        DetectionPattern(
            id=EntityId(EntityKind.DETECTION, _FAMILY_BASE + offset),
            name=f"Synthetic Detection {offset + 1}",
            description="Generated placeholder detection pattern.",
            signal_class=list(SignalClass)[offset % len(SignalClass)],
        )
        for offset in range(manifest.detections)
    ]

    techniques = []
    for offset in range(manifest.techniques):
        phase = phases[offset % len(phases)]
        phase_tactics = tactics_by_phase.get(phase.id, [])
        tactic_ids = frozenset({phase_tactics[offset % len(phase_tactics)].id}) if phase_tactics else frozenset()
        detection_ids = (
            frozenset({detections[offset % len(detections)].id}) if detections else frozenset()
        )
        techniques.append(
            TechniqueEntry(
                id=EntityId(EntityKind.TECHNIQUE, _FAMILY_BASE + offset),
                name=f"Synthetic Technique {offset + 1}",
                description="Generated placeholder technique.",
                phase_ids=frozenset({phase.id}),
                tactic_ids=tactic_ids,
                detection_ids=detection_ids,
            )
        )

    mitigations = [
        Mitigation(
            id=EntityId(EntityKind.MITIGATION, offset + 1),
            name=f"Synthetic Mitigation {offset + 1}",
            description="Generated placeholder mitigation.",
            technique_ids=(
                frozenset({techniques[offset % len(techniques)].id})
                if techniques
                else frozenset()
            ),
        )
        for offset in range(manifest.mitigations)
    ]
    tools = [
        ToolEntry(
            id=EntityId(EntityKind.TOOL, offset + 1),
            name=f"Synthetic Tool {offset + 1}",
            description="Generated placeholder tool.",
            technique_ids=(
                frozenset({techniques[offset % len(techniques)].id})
                if techniques
                else frozenset()
            ),
        )
        for offset in range(manifest.tools)
    ]

    draft = CorpusDraft(
        manifest=manifest,
        phases=phases,
        tactics=tactics,
        techniques=techniques,
        detections=detections,
        mitigations=mitigations,
        tools=tools,
    )
    return build_corpus(draft)
