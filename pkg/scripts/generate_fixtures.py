#!/usr/bin/env python3
"""Regenerate the bundled fixtures in canonical form.

The seed corpus carries the published FIST case-study catalog: the four
kill-chain phases and the thirteen techniques with their detection points.
Parent families and per-phase tactics are unpublished upstream, so those
entries are marked provisional; they keep references resolvable without
counting as catalog content.

Run from the repo root: python scripts/generate_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fist.canonical import parse_timestamp
from fist.corpus import CorpusDraft, build_corpus, save_corpus
from fist.incident import IncidentFlow, TechniqueObservation, annotate_incident, flow_to_json
from fist.model import (
    DetectionPattern,
    EntityId,
    Manifest,
    Phase,
    SignalClass,
    Tactic,
    TechniqueEntry,
)
from fist.model import EntityKind as K

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "fist" / "data"


def pid(family: int) -> EntityId:
    return EntityId(K.PHASE, family)


def taid(family: int) -> EntityId:
    return EntityId(K.TACTIC, family)


def tid(family: int, sub: int | None = None) -> EntityId:
    return EntityId(K.TECHNIQUE, family, sub)


def did(family: int, sub: int | None = None) -> EntityId:
    return EntityId(K.DETECTION, family, sub)


PHASES = [
    Phase(
        pid(1),
        "Preparation",
        "Attackers assemble what the scheme needs: victim research, fake "
        "identities, fraudulent platforms, and supporting infrastructure.",
        1,
    ),
    Phase(
        pid(2),
        "Promotion",
        "Fraudulent offers are pushed toward potential victims through ads, "
        "messaging, and impersonation designed to trigger interest.",
        2,
    ),
    Phase(
        pid(3),
        "Engagement",
        "Direct interaction with victims builds trust and steers them into "
        "damaging actions such as payments or data disclosure.",
        3,
    ),
    Phase(
        pid(4),
        "Concealment",
        "After the act, operators hide their identity, launder proceeds, and "
        "erase operational traces.",
        4,
    ),
]

TACTICS = [
    Tactic(
        taid(1),
        "Asset Preparation",
        "Stand-in tactic grouping the Preparation-phase techniques until the "
        "upstream tactic catalog is published.",
        pid(1),
        provisional=True,
    ),
    Tactic(
        taid(2),
        "Lure Distribution",
        "Stand-in tactic grouping the Promotion-phase techniques until the "
        "upstream tactic catalog is published.",
        pid(2),
        provisional=True,
    ),
    Tactic(
        taid(3),
        "Victim Manipulation",
        "Stand-in tactic grouping the Engagement-phase techniques until the "
        "upstream tactic catalog is published.",
        pid(3),
        provisional=True,
    ),
    Tactic(
        taid(4),
        "Trace Elimination",
        "Stand-in tactic grouping the Concealment-phase techniques until the "
        "upstream tactic catalog is published.",
        pid(4),
        provisional=True,
    ),
]

# (id, name, description, phase family, detection id)
CATALOG_TECHNIQUES = [
    (
        tid(3),
        "Social Media Analysis",
        "Mining public social profiles to select victims and gauge their "
        "interests and financial capacity.",
        1,
        did(2, 1),
    ),
    (
        tid(9, 2),
        "Fake Investment Text Creation",
        "Writing investment pitches built around fabricated returns to bait "
        "victims.",
        1,
        did(1, 10),
    ),
    (
        tid(10, 1),
        "Fake Account Creation",
        "Registering sock-puppet accounts that pose as credible personas.",
        1,
        did(1, 1),
    ),
    (
        tid(12),
        "Fraudulent Website Creation",
        "Standing up sites that imitate legitimate services or brokers.",
        1,
        did(3, 1),
    ),
    (
        tid(14, 1),
        "Social Media Advertising",
        "Paid ad placement funneling targeted audiences toward the scheme.",
        2,
        did(2, 1),
    ),
    (
        tid(17, 1),
        "Exploiting Greed",
        "Pressuring victims with promises of outsized gains or exclusive "
        "opportunities.",
        2,
        did(1, 12),
    ),
    (
        tid(20, 3),
        "Impersonating Celebrities",
        "Borrowing the identity of well-known figures to lend the scheme "
        "authority.",
        2,
        did(1, 2),
    ),
    (
        tid(21, 1),
        "Investment App Download",
        "Convincing victims to install an attacker-controlled trading "
        "application.",
        3,
        did(3, 2),
    ),
    (
        tid(33),
        "Fund Transfer Requests",
        "Instructing victims to move money to attacker-controlled accounts.",
        3,
        did(4, 3),
    ),
    (
        tid(34, 2),
        "Direct Fund Transfer",
        "Moving money straight out of victim accounts once access or consent "
        "is obtained.",
        3,
        did(4, 1),
    ),
    (
        tid(47, 3),
        "Shell Company Usage",
        "Routing proceeds through front companies to blur ownership.",
        4,
        did(4, 7),
    ),
    (
        tid(50, 2),
        "Domain Deletion",
        "Tearing down domains and sites once the operation winds up.",
        4,
        did(3, 1),
    ),
    (
        tid(56),
        "Cryptocurrency Usage",
        "Converting proceeds to cryptocurrency to frustrate tracing.",
        4,
        did(4, 8),
    ),
]

# (id, name, description, signal class)
CATALOG_DETECTIONS = [
    (
        did(1, 1),
        "AI-Generated Content Detection",
        "Flags synthetic media such as AI-generated avatars and deepfake "
        "imagery.",
        SignalClass.CONTENT_ANALYSIS,
    ),
    (
        did(1, 2),
        "Reverse Image Search",
        "Looks up published photos to spot stolen or reused likenesses.",
        SignalClass.CONTENT_ANALYSIS,
    ),
    (
        did(1, 10),
        "Fraud Keywords Detection",
        "Matches message text against fraud-typical phrasing such as "
        "guaranteed or risk-free returns.",
        SignalClass.CONTENT_ANALYSIS,
    ),
    (
        did(1, 12),
        "Manipulative Language Detection",
        "Detects urgency framing and other psychological-pressure wording.",
        SignalClass.CONTENT_ANALYSIS,
    ),
    (
        did(2, 1),
        "Abnormal Account Activity",
        "Surfaces anomalous account behavior such as rapid profile browsing "
        "or new accounts with heavy ad spend.",
        SignalClass.ACCOUNT_BEHAVIOR,
    ),
    (
        did(3, 1),
        "Suspicious Domain Lifecycle",
        "Tracks domain registration and takedown anomalies, including "
        "typosquats and short-lived sites.",
        SignalClass.INFRASTRUCTURE,
    ),
    (
        did(3, 2),
        "Untrusted App Distribution",
        "Identifies application installs originating from unverified sources "
        "or suspicious hosts.",
        SignalClass.INFRASTRUCTURE,
    ),
    (
        did(4, 1),
        "Transaction Anomaly Detection",
        "Catches unusual transaction frequency and outsized movements.",
        SignalClass.FINANCIAL_FLOW,
    ),
    (
        did(4, 3),
        "High-Risk Fund Flow",
        "Flags transfers routed toward high-risk destinations or atypical "
        "corridors.",
        SignalClass.FINANCIAL_FLOW,
    ),
    (
        did(4, 7),
        "Entity Relationship Analysis",
        "Links accounts and corporate entities to expose hidden "
        "beneficiaries.",
        SignalClass.FINANCIAL_FLOW,
    ),
    (
        did(4, 8),
        "Blockchain Analysis",
        "Traces on-chain movements and mixer usage.",
        SignalClass.FINANCIAL_FLOW,
    ),
]

DETECTION_GROUPS = [
    (did(1), "Content Analysis Detections", SignalClass.CONTENT_ANALYSIS),
    (did(2), "Account Behavior Detections", SignalClass.ACCOUNT_BEHAVIOR),
    (did(3), "Infrastructure Detections", SignalClass.INFRASTRUCTURE),
    (did(4), "Financial Flow Detections", SignalClass.FINANCIAL_FLOW),
]

# sequence order follows the case timeline: one observation per catalog row
CASE_OBSERVATIONS = [
    (tid(3), 1, "Analyzed victim profiles to identify investment interests and financial capacity", did(2, 1)),
    (tid(9, 2), 1, 'Created high-return investment plans promising "30% monthly profits"', did(1, 10)),
    (tid(10, 1), 1, "Established professional investment advisor personas with AI-generated avatars", did(1, 1)),
    (tid(12), 1, "Built fake investment platforms mimicking legitimate brokers", did(3, 1)),
    (tid(14, 1), 2, "Deployed targeted Facebook ads focusing on high-income demographics", did(2, 1)),
    (tid(17, 1), 2, 'Emphasized "limited-time opportunities" and "insider information"', did(1, 12)),
    (tid(20, 3), 2, "Used photos and names of renowned financial experts", did(1, 2)),
    (tid(21, 1), 3, 'Required victims to download "exclusive" trading applications', did(3, 2)),
    (tid(33), 3, "Guided victims through wire transfers to offshore accounts", did(4, 3)),
    (tid(34, 2), 3, "Executed actual monetary transfers from victim accounts", did(4, 1)),
    (tid(47, 3), 4, "Utilized multiple shell companies to obscure fund trails", did(4, 7)),
    (tid(50, 2), 4, "Removed fraudulent websites and domains post-operation", did(3, 1)),
    (tid(56), 4, "Converted funds to cryptocurrency for enhanced anonymity", did(4, 8)),
]


def build_seed_corpus():
    techniques = []
    group_families = sorted({t[0].family for t in CATALOG_TECHNIQUES if t[0].sub})
    for family in group_families:
        techniques.append(
            TechniqueEntry(
                id=tid(family),
                name=f"Technique Group T{family:04d}",
                description=(
                    "Provisional parent entry kept so sub-technique references "
                    "resolve; the upstream catalog has not published this "
                    "family yet."
                ),
                provisional=True,
            )
        )
    for entity_id, name, description, phase_family, detection in CATALOG_TECHNIQUES:
        techniques.append(
            TechniqueEntry(
                id=entity_id,
                name=name,
                description=description,
                phase_ids=frozenset({pid(phase_family)}),
                tactic_ids=frozenset({taid(phase_family)}),
                detection_ids=frozenset({detection}),
            )
        )

    detections = [
        DetectionPattern(
            id=entity_id,
            name=name,
            description=(
                "Provisional family entry grouping the published detection "
                "patterns of this signal class."
            ),
            signal_class=signal,
            provisional=True,
        )
        for entity_id, name, signal in DETECTION_GROUPS
    ]
    detections += [
        DetectionPattern(id=entity_id, name=name, description=description, signal_class=signal)
        for entity_id, name, description, signal in CATALOG_DETECTIONS
    ]

    manifest = Manifest(
        corpus_version="0.1.0",
        phases=4,
        tactics=0,
        techniques=13,
        detections=11,
        mitigations=0,
        tools=0,
    )
    draft = CorpusDraft(
        manifest=manifest,
        phases=list(PHASES),
        tactics=list(TACTICS),
        techniques=techniques,
        detections=detections,
    )
    return build_corpus(draft)


def build_case_incident(corpus) -> IncidentFlow:
    observations = tuple(
        TechniqueObservation(
            technique_id=technique,
            phase_id=pid(phase_family),
            observed_behavior=behavior,
            detection_hits=frozenset({hit}),
        )
        for technique, phase_family, behavior, hit in CASE_OBSERVATIONS
    )
    flow = IncidentFlow(
        incident_id="case-investment-fraud",
        title="Social media investment fraud ring",
        summary=(
            "Operators posing as financial experts recruited victims into a "
            "messaging group, moved them onto a counterfeit trading platform, "
            "escalated transfer requests as trust grew, and cashed out "
            "through shell companies and cryptocurrency."
        ),
        created_at=parse_timestamp("2025-01-15T00:00:00Z"),
        observations=observations,
    )
    return annotate_incident(corpus, flow)


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    corpus = build_seed_corpus()
    (DATA_DIR / "seed_corpus.json").write_text(save_corpus(corpus), encoding="utf-8")
    incident = build_case_incident(corpus)
    (DATA_DIR / "case_incident.json").write_text(flow_to_json(incident), encoding="utf-8")
    counts = corpus.catalog_counts()
    print(f"seed corpus: {counts} digest={corpus.source_digest[:16]}")
    print(f"case incident: {len(incident.observations)} observations")


if __name__ == "__main__":
    main()
