import itertools
import json
import random
from datetime import timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fist.canonical import parse_timestamp
from fist.errors import (
    DuplicateIncidentId,
    NotFound,
    PhaseMismatch,
    SchemaError,
    UnknownDetection,
    UnknownTechnique,
)
from fist.fixtures import load_seed_corpus
from fist.incident import (
    GapReason,
    IncidentFlow,
    IncidentStore,
    ReportFormat,
    TechniqueObservation,
    annotate_incident,
    compute_coverage,
    flow_from_dict,
    flow_to_dict,
    flow_to_json,
    render_report,
)
from fist.model import parse_entity_id

from .conftest import load_document

SEED = load_seed_corpus()
TS = parse_timestamp("2025-03-01T12:00:00Z")


def observation(technique, phase, hits=(), behavior="seen", observed_at=None):
    return TechniqueObservation(
        technique_id=parse_entity_id(technique),
        phase_id=parse_entity_id(phase),
        observed_behavior=behavior,
        detection_hits=frozenset(parse_entity_id(h) for h in hits),
        observed_at=observed_at,
    )


def flow_of(observations, incident_id="flow-test"):
    return IncidentFlow(
        incident_id=incident_id,
        title="Test flow",
        summary="",
        created_at=TS,
        observations=tuple(observations),
    )


def oracle_coverage(corpus, flow):
    """Brute-force recomputation of the three ratios and the gap list.

    Deliberately naive: plain loops over raw data, no shared helpers with
    the implementation under test.
    """
    phases_seen = []
    techniques_seen = []
    for obs in flow.observations:
        if obs.phase_id not in phases_seen:
            phases_seen.append(obs.phase_id)
        if obs.technique_id not in techniques_seen:
            techniques_seen.append(obs.technique_id)

    corpus_phase_count = 0
    for _ in corpus.phases:
        corpus_phase_count += 1

    mapped = []
    for technique_id in techniques_seen:
        entry = corpus.techniques[technique_id]
        how_many = 0
        for _ in entry.detection_ids:
            how_many += 1
        if how_many > 0:
            mapped.append(technique_id)

    hit = []
    for technique_id in techniques_seen:
        saw_hit = False
        for obs in flow.observations:
            if obs.technique_id == technique_id:
                for _ in obs.detection_hits:
                    saw_hit = True
        if saw_hit:
            hit.append(technique_id)

    if corpus_phase_count == 0:
        phase_coverage = 0.0
    else:
        phase_coverage = len(phases_seen) / corpus_phase_count
    if len(techniques_seen) == 0:
        opportunity = 0.0
        realized = 0.0
    else:
        opportunity = len(mapped) / len(techniques_seen)
        realized = len(hit) / len(techniques_seen)

    gaps = []
    for technique_id in sorted(techniques_seen):
        if technique_id not in mapped:
            gaps.append((technique_id, "NoMappedDetection"))
        elif technique_id not in hit:
            gaps.append((technique_id, "NoHitRecorded"))
    return phase_coverage, opportunity, realized, gaps


def assert_matches_oracle(corpus, flow):
    report = compute_coverage(corpus, flow)
    phase_coverage, opportunity, realized, gaps = oracle_coverage(corpus, flow)
    assert report.phase_coverage == phase_coverage
    assert report.detection_opportunity == opportunity
    assert report.detection_realized == realized
    assert [(g.technique_id, g.reason.value) for g in report.gaps] == gaps


class TestAnnotate:
    def test_case_flow_sequences(self, seed_corpus, case_flow):
        assert [o.sequence for o in case_flow.observations] == list(range(1, 14))

    def test_phase_mismatch(self, seed_corpus):
        with pytest.raises(PhaseMismatch) as excinfo:
            annotate_incident(seed_corpus, flow_of([observation("T0003", "P0004")]))
        assert excinfo.value.subject == "T0003"

    def test_unknown_detection_hit(self, seed_corpus):
        flow = flow_of([observation("T0003", "P0001", hits=["D0009.001"])])
        with pytest.raises(UnknownDetection) as excinfo:
            annotate_incident(seed_corpus, flow)
        assert excinfo.value.subject == "D0009.001"

    def test_unknown_technique(self, seed_corpus):
        with pytest.raises(UnknownTechnique):
            annotate_incident(seed_corpus, flow_of([observation("T9999", "P0001")]))

    def test_unmapped_hit_accepted(self, seed_corpus):
        # D0004.008 is not mapped to T0003, but it exists: recorded, not rejected
        flow = annotate_incident(
            seed_corpus, flow_of([observation("T0003", "P0001", hits=["D0004.008"])])
        )
        assert flow.observations[0].detection_hits == {parse_entity_id("D0004.008")}

    def test_repeat_technique_allowed(self, seed_corpus):
        flow = annotate_incident(
            seed_corpus,
            flow_of([observation("T0033", "P0003"), observation("T0033", "P0003")]),
        )
        assert [o.sequence for o in flow.observations] == [1, 2]

    def test_renumber_preserves_order(self, seed_corpus):
        base = flow_of([observation("T0033", "P0003"), observation("T0056", "P0004")])
        shifted = IncidentFlow(
            incident_id=base.incident_id,
            title=base.title,
            summary=base.summary,
            created_at=base.created_at,
            observations=tuple(
                TechniqueObservation(
                    technique_id=o.technique_id,
                    phase_id=o.phase_id,
                    observed_behavior=o.observed_behavior,
                    detection_hits=o.detection_hits,
                    sequence=99 + i,
                )
                for i, o in enumerate(base.observations)
            ),
        )
        annotated = annotate_incident(seed_corpus, shifted)
        assert [o.sequence for o in annotated.observations] == [1, 2]
        assert [str(o.technique_id) for o in annotated.observations] == ["T0033", "T0056"]

    def test_bad_incident_id(self, seed_corpus):
        with pytest.raises(SchemaError):
            annotate_incident(seed_corpus, flow_of([], incident_id="../evil"))


class TestCoverage:
    def test_full_case_study(self, seed_corpus, case_flow):
        report = compute_coverage(seed_corpus, case_flow)
        assert report.phase_coverage == 1.0
        assert report.detection_opportunity == 1.0
        assert report.detection_realized == 1.0
        assert report.gaps == ()
        assert len(report.phases_hit) == 4

    def test_empty_flow(self, seed_corpus):
        report = compute_coverage(seed_corpus, flow_of([]))
        assert report.phase_coverage == 0.0
        assert report.detection_opportunity == 0.0
        assert report.detection_realized == 0.0
        assert report.gaps == ()

    def test_hits_only_on_engagement(self, seed_corpus, case_flow):
        engagement = parse_entity_id("P0003")
        stripped = IncidentFlow(
            incident_id=case_flow.incident_id,
            title=case_flow.title,
            summary=case_flow.summary,
            created_at=case_flow.created_at,
            observations=tuple(
                o
                if o.phase_id == engagement
                else TechniqueObservation(
                    technique_id=o.technique_id,
                    phase_id=o.phase_id,
                    observed_behavior=o.observed_behavior,
                    detection_hits=frozenset(),
                    sequence=o.sequence,
                )
                for o in case_flow.observations
            ),
        )
        report = compute_coverage(seed_corpus, stripped)
        assert report.detection_realized == 3 / 13
        assert report.detection_opportunity == 1.0
        gaps = [g for g in report.gaps if g.reason is GapReason.NO_HIT_RECORDED]
        assert len(gaps) == len(report.gaps) == 10

    def test_no_mapped_detection_gap(self, seed_document):
        for technique in seed_document["techniques"]:
            if technique["id"] == "T0003":
                technique["detections"] = []
        corpus = load_document(seed_document)
        report = compute_coverage(corpus, flow_of([observation("T0003", "P0001")]))
        assert report.detection_opportunity == 0.0
        assert [(str(g.technique_id), g.reason.value) for g in report.gaps] == [
            ("T0003", "NoMappedDetection")
        ]
        # a novel hit does not change the missing catalog mapping
        report = compute_coverage(
            corpus, flow_of([observation("T0003", "P0001", hits=["D0001.001"])])
        )
        assert report.detection_realized == 1.0
        assert [g.reason.value for g in report.gaps] == ["NoMappedDetection"]

    def test_permutation_invariance(self, seed_corpus, case_flow):
        baseline = compute_coverage(seed_corpus, case_flow)
        rng = random.Random(3)
        for _ in range(5):
            shuffled = list(case_flow.observations)
            rng.shuffle(shuffled)
            flow = annotate_incident(seed_corpus, flow_of(shuffled))
            report = compute_coverage(seed_corpus, flow)
            assert report.phase_coverage == baseline.phase_coverage
            assert report.detection_opportunity == baseline.detection_opportunity
            assert report.detection_realized == baseline.detection_realized
            assert report.gaps == baseline.gaps


class TestCoverageOracle:
    def test_exhaustive_pairs(self, seed_corpus, case_flow):
        variants = []
        for obs in case_flow.observations:
            variants.append(obs)
            variants.append(
                TechniqueObservation(
                    technique_id=obs.technique_id,
                    phase_id=obs.phase_id,
                    observed_behavior=obs.observed_behavior,
                    detection_hits=frozenset(),
                )
            )
        for pair in itertools.product(variants, repeat=2):
            assert_matches_oracle(seed_corpus, flow_of(pair))
        for single in variants:
            assert_matches_oracle(seed_corpus, flow_of([single]))

    def test_exhaustive_subsets_to_three(self, seed_corpus, case_flow):
        observations = case_flow.observations
        for size in range(0, 4):
            for subset in itertools.combinations(observations, size):
                assert_matches_oracle(seed_corpus, flow_of(subset))


def seed_observations(max_hits=2):
    detailed = sorted(t.id for t in SEED.techniques.values() if t.phase_ids)
    detections = sorted(SEED.detections)

    @st.composite
    def one(draw):
        technique_id = draw(st.sampled_from(detailed))
        phase_id = draw(st.sampled_from(sorted(SEED.techniques[technique_id].phase_ids)))
        hits = draw(st.sets(st.sampled_from(detections), max_size=max_hits))
        return TechniqueObservation(
            technique_id=technique_id,
            phase_id=phase_id,
            observed_behavior=draw(st.text(max_size=8)),
            detection_hits=frozenset(hits),
        )

    return one()


seed_flows = st.builds(
    lambda obs: flow_of(obs), st.lists(seed_observations(), max_size=6)
)


@settings(max_examples=150)
@given(seed_flows)
def test_oracle_equivalence_random_flows(flow):
    annotated = annotate_incident(SEED, flow)
    assert_matches_oracle(SEED, annotated)


@settings(max_examples=100)
@given(seed_flows, seed_observations())
def test_phase_coverage_monotone_under_observation(flow, extra):
    before = compute_coverage(SEED, annotate_incident(SEED, flow))
    extended = flow_of(flow.observations + (extra,))
    after = compute_coverage(SEED, annotate_incident(SEED, extended))
    assert after.phase_coverage >= before.phase_coverage


@settings(max_examples=100)
@given(seed_flows, st.data())
def test_detection_realized_monotone_under_hit(flow, data):
    if not flow.observations:
        return
    before = compute_coverage(SEED, annotate_incident(SEED, flow))
    index = data.draw(st.integers(0, len(flow.observations) - 1))
    hit = data.draw(st.sampled_from(sorted(SEED.detections)))
    patched = list(flow.observations)
    target = patched[index]
    patched[index] = TechniqueObservation(
        technique_id=target.technique_id,
        phase_id=target.phase_id,
        observed_behavior=target.observed_behavior,
        detection_hits=target.detection_hits | {hit},
    )
    after = compute_coverage(SEED, annotate_incident(SEED, flow_of(patched)))
    assert after.detection_realized >= before.detection_realized


class TestReport:
    def test_markdown_phase_headings_in_order(self, seed_corpus, case_flow):
        report = compute_coverage(seed_corpus, case_flow)
        text = render_report(seed_corpus, case_flow, report, ReportFormat.MARKDOWN)
        positions = [text.index(f"## {name}") for name in
                     ("Preparation", "Promotion", "Engagement", "Concealment")]
        assert positions == sorted(positions)
        assert "## Coverage" in text

    def test_empty_flow_report(self, seed_corpus):
        flow = flow_of([])
        report = compute_coverage(seed_corpus, flow)
        text = render_report(seed_corpus, flow, report, ReportFormat.MARKDOWN)
        assert text.count("No observations in this phase.") == 4
        assert "Phase coverage: 0.0000" in text

    def test_deterministic_bytes(self, seed_corpus, case_flow):
        report = compute_coverage(seed_corpus, case_flow)
        first = render_report(seed_corpus, case_flow, report, ReportFormat.MARKDOWN)
        second = render_report(seed_corpus, case_flow, report, ReportFormat.MARKDOWN)
        assert first == second

    def test_json_report_carries_flow_and_coverage(self, seed_corpus, case_flow):
        report = compute_coverage(seed_corpus, case_flow)
        parsed = json.loads(render_report(seed_corpus, case_flow, report, ReportFormat.JSON))
        assert parsed["incident"] == flow_to_dict(case_flow)
        assert parsed["coverage"] == report.to_dict()

    def test_unmapped_hits_flagged(self, seed_corpus):
        flow = annotate_incident(
            seed_corpus, flow_of([observation("T0003", "P0001", hits=["D0004.008"])])
        )
        report = compute_coverage(seed_corpus, flow)
        text = render_report(seed_corpus, flow, report, ReportFormat.MARKDOWN)
        assert "`D0004.008` (unmapped)" in text


class TestDocuments:
    def test_roundtrip(self, case_flow):
        assert flow_from_dict(flow_to_dict(case_flow)) == case_flow

    def test_observed_at_roundtrip(self, seed_corpus):
        flow = annotate_incident(
            seed_corpus,
            flow_of([observation("T0003", "P0001", observed_at=TS)]),
        )
        parsed = flow_from_dict(flow_to_dict(flow))
        assert parsed.observations[0].observed_at == TS
        assert parsed.observations[0].observed_at.tzinfo == timezone.utc

    def test_unknown_field_rejected(self, case_flow):
        document = flow_to_dict(case_flow)
        document["severity"] = "high"
        with pytest.raises(SchemaError, match="unknown keys"):
            flow_from_dict(document)

    def test_bad_sequence(self, case_flow):
        document = flow_to_dict(case_flow)
        document["observations"][0]["sequence"] = 0
        with pytest.raises(SchemaError, match="sequence"):
            flow_from_dict(document)

    def test_bad_timestamp(self, case_flow):
        document = flow_to_dict(case_flow)
        document["created_at"] = "2025-01-15 00:00:00"
        with pytest.raises(SchemaError, match="timestamp"):
            flow_from_dict(document)


class TestStore:
    def test_roundtrip(self, store, case_flow):
        store.store(case_flow)
        assert store.load(case_flow.incident_id) == case_flow

    def test_duplicate_rejected(self, store, case_flow):
        store.store(case_flow)
        with pytest.raises(DuplicateIncidentId):
            store.store(case_flow)

    def test_empty_dir_lists_nothing(self, store):
        assert store.list() == []

    def test_list_sorted(self, store, case_flow):
        for incident_id in ("zeta", "alpha", "mid-1"):
            store.store(
                IncidentFlow(
                    incident_id=incident_id,
                    title="x",
                    summary="",
                    created_at=TS,
                )
            )
        assert store.list() == ["alpha", "mid-1", "zeta"]

    def test_load_missing(self, store):
        with pytest.raises(NotFound):
            store.load("ghost")

    def test_update_appends(self, store, seed_corpus, case_flow):
        store.store(case_flow)

        def mutate(flow):
            extended = flow.observations + (observation("T0033", "P0003"),)
            return annotate_incident(
                seed_corpus,
                IncidentFlow(
                    incident_id=flow.incident_id,
                    title=flow.title,
                    summary=flow.summary,
                    created_at=flow.created_at,
                    observations=extended,
                ),
            )

        updated = store.update(case_flow.incident_id, mutate)
        assert len(updated.observations) == 14
        assert store.load(case_flow.incident_id) == updated

    def test_update_failure_writes_nothing(self, store, seed_corpus, case_flow):
        store.store(case_flow)

        def mutate(flow):
            raise PhaseMismatch("nope", subject="T0003")

        with pytest.raises(PhaseMismatch):
            store.update(case_flow.incident_id, mutate)
        assert store.load(case_flow.incident_id) == case_flow

    def test_path_traversal_blocked(self, store, case_flow):
        with pytest.raises(SchemaError):
            store.load("../../etc/passwd")

    def test_stored_document_is_canonical_json(self, store, case_flow, tmp_path):
        store.store(case_flow)
        path = store.data_dir / f"{case_flow.incident_id}.json"
        assert path.read_text(encoding="utf-8") == flow_to_json(case_flow)
