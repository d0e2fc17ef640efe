"""Hypothesis strategies for identifiers and randomized valid corpora."""

from __future__ import annotations

from hypothesis import strategies as st

from fist.corpus import CorpusDraft
from fist.model import (
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

SUB_KINDS = (EntityKind.TECHNIQUE, EntityKind.DETECTION)


@st.composite
def entity_ids(draw, kind: EntityKind | None = None) -> EntityId:
    kind = kind or draw(st.sampled_from(list(EntityKind)))
    family = draw(st.integers(0, 9999))
    sub = None
    if kind in SUB_KINDS and draw(st.booleans()):
        sub = draw(st.integers(1, 999))
    return EntityId(kind, family, sub)


names = st.text(min_size=1, max_size=12)
descriptions = st.text(max_size=30)
versions = st.from_regex(r"[0-9]{1,2}\.[0-9]{1,2}\.[0-9]{1,2}", fullmatch=True)


def _subset(items, draw, max_size=None):
    if not items:
        return frozenset()
    chosen = draw(
        st.lists(st.sampled_from(sorted(items)), max_size=max_size or len(items))
    )
    return frozenset(chosen)


@st.composite
def corpus_drafts(draw) -> CorpusDraft:
    """Randomized corpus satisfying every integrity invariant (<= 50 entities)."""
    n_phases = draw(st.integers(0, 4))
    orders = draw(st.permutations(list(range(1, n_phases + 1))))
    phase_families = draw(
        st.lists(st.integers(1, 9999), min_size=n_phases, max_size=n_phases, unique=True)
    )
    phases = [
        Phase(
            id=EntityId(EntityKind.PHASE, family),
            name=draw(names),
            description=draw(descriptions),
            order=order,
        )
        for family, order in zip(phase_families, orders)
    ]
    phase_ids = [p.id for p in phases]

    tactics = []
    if phases:
        tactic_families = draw(
            st.lists(st.integers(1, 9999), max_size=4, unique=True)
        )
        for family in tactic_families:
            tactics.append(
                Tactic(
                    id=EntityId(EntityKind.TACTIC, family),
                    name=draw(names),
                    description=draw(descriptions),
                    phase_id=draw(st.sampled_from(phase_ids)),
                    provisional=draw(st.booleans()),
                )
            )

    detections = _family_tree(
        draw,
        kind=EntityKind.DETECTION,
        build=lambda eid, provisional: DetectionPattern(
            id=eid,
            name=draw(names),
            description=draw(descriptions),
            signal_class=draw(st.sampled_from(list(SignalClass))),
            provisional=provisional,
        ),
    )
    detection_ids = [d.id for d in detections]

    techniques = []
    if phases:
        shells = _family_tree(draw, kind=EntityKind.TECHNIQUE, build=None)
        for eid, provisional in shells:
            linked_phases = (
                frozenset(draw(st.sets(st.sampled_from(phase_ids), min_size=1)))
                if not provisional or draw(st.booleans())
                else frozenset()
            )
            legal_tactics = [t.id for t in tactics if t.phase_id in linked_phases]
            techniques.append(
                TechniqueEntry(
                    id=eid,
                    name=draw(names),
                    description=draw(descriptions),
                    phase_ids=linked_phases,
                    tactic_ids=_subset(legal_tactics, draw),
                    detection_ids=_subset(detection_ids, draw, max_size=3),
                    provisional=provisional,
                )
            )
    technique_ids = [t.id for t in techniques]

    mitigations = [
        Mitigation(
            id=EntityId(EntityKind.MITIGATION, family),
            name=draw(names),
            description=draw(descriptions),
            technique_ids=_subset(technique_ids, draw, max_size=3),
            provisional=draw(st.booleans()),
        )
        for family in draw(st.lists(st.integers(1, 9999), max_size=3, unique=True))
    ]
    tools = [
        ToolEntry(
            id=EntityId(EntityKind.TOOL, family),
            name=draw(names),
            description=draw(descriptions),
            technique_ids=_subset(technique_ids, draw, max_size=3),
            provisional=draw(st.booleans()),
        )
        for family in draw(st.lists(st.integers(1, 9999), max_size=3, unique=True))
    ]

    # Optionally link techniques back to mitigations/tools.
    linked_techniques = []
    for technique in techniques:
        linked_techniques.append(
            TechniqueEntry(
                id=technique.id,
                name=technique.name,
                description=technique.description,
                phase_ids=technique.phase_ids,
                tactic_ids=technique.tactic_ids,
                detection_ids=technique.detection_ids,
                mitigation_ids=_subset([m.id for m in mitigations], draw, max_size=2),
                tool_ids=_subset([t.id for t in tools], draw, max_size=2),
                provisional=technique.provisional,
            )
        )

    def non_provisional(entities):
        return sum(1 for e in entities if not getattr(e, "provisional", False))

    manifest = Manifest(
        corpus_version=draw(versions),
        phases=len(phases),
        tactics=non_provisional(tactics),
        techniques=non_provisional(linked_techniques),
        detections=non_provisional(detections),
        mitigations=non_provisional(mitigations),
        tools=non_provisional(tools),
    )
    return CorpusDraft(
        manifest=manifest,
        phases=phases,
        tactics=tactics,
        techniques=linked_techniques,
        detections=detections,
        mitigations=mitigations,
        tools=tools,
    )


def _family_tree(draw, kind: EntityKind, build):
    """Families where some entries carry sub-numbers; parents always present.

    With ``build=None``, returns (id, provisional) shells instead of entities.
    """
    families = draw(st.lists(st.integers(1, 9999), max_size=4, unique=True))
    result = []
    for family in families:
        subs = draw(st.lists(st.integers(1, 999), max_size=2, unique=True))
        parent_provisional = draw(st.booleans()) if subs else False
        shells = [(EntityId(kind, family), parent_provisional)]
        shells += [(EntityId(kind, family, sub), False) for sub in subs]
        for eid, provisional in shells:
            result.append((eid, provisional) if build is None else build(eid, provisional))
    return result
