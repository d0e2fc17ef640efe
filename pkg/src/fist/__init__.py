"""Executable knowledge base for the FIST fraud threat-modeling framework.

Parse and validate FIST corpora, map fraud incidents onto the framework,
compute kill-chain coverage and detection-gap metrics, and export
standardized intelligence artifacts.
"""

from .corpus import ChangeSet, Corpus, CorpusDraft, build_corpus, diff_corpora, load_corpus, save_corpus
from .errors import (
    DuplicateIncidentId,
    FistError,
    IntegrityError,
    MalformedId,
    NotFound,
    PhaseMismatch,
    ScaleDrift,
    SchemaError,
    UnknownDetection,
    UnknownTechnique,
)
from .incident import (
    CoverageReport,
    GapEntry,
    GapReason,
    IncidentFlow,
    IncidentStore,
    ReportFormat,
    TechniqueObservation,
    annotate_incident,
    compute_coverage,
    render_report,
)
from .interop import (
    CrossMapping,
    LayerDocument,
    export_layer,
    export_stix_bundle,
    load_crossmap,
    resolve_external,
)
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
    format_entity_id,
    parse_entity_id,
)
from .query import build_matrix, detections_for_technique, get_entity, techniques_by_phase
from .validator import CountMismatch, Violation, validate_integrity, validate_manifest

__version__ = "0.1.0"
