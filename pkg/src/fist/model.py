"""Domain types for FIST entities and the identifier grammar that names them.

All values here are frozen dataclasses: once constructed they are immutable
and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import total_ordering

from .errors import MalformedId, SchemaError


class EntityKind(str, Enum):
    PHASE = "phase"
    TACTIC = "tactic"
    TECHNIQUE = "technique"
    DETECTION = "detection"
    MITIGATION = "mitigation"
    TOOL = "tool"


# Prefixes for canonical id text. "TA" must be tried before "T" when parsing.
KIND_PREFIX: dict[EntityKind, str] = {
    EntityKind.PHASE: "P",
    EntityKind.TACTIC: "TA",
    EntityKind.TECHNIQUE: "T",
    EntityKind.DETECTION: "D",
    EntityKind.MITIGATION: "M",
    EntityKind.TOOL: "S",
}

PREFIX_KIND = {prefix: kind for kind, prefix in KIND_PREFIX.items()}

# Only techniques and detections may carry a three-digit sub-number.
SUB_KINDS = frozenset({EntityKind.TECHNIQUE, EntityKind.DETECTION})

_KIND_RANK = {kind: rank for rank, kind in enumerate(EntityKind)}

_ID_RE = re.compile(r"(TA|P|T|D|M|S)([0-9]{4})(?:\.([0-9]{3}))?")


@total_ordering
@dataclass(frozen=True)
class EntityId:
    """Typed identifier: kind, 4-digit family, optional 3-digit sub-number."""

    kind: EntityKind
    family: int
    sub: int | None = None

    def __post_init__(self):
        if not 0 <= self.family <= 9999:
            raise MalformedId(f"family {self.family} outside 0-9999")
        if self.sub is not None:
            if self.kind not in SUB_KINDS:
                raise MalformedId(f"sub-number not allowed for kind {self.kind.value}")
            if not 1 <= self.sub <= 999:
                raise MalformedId(f"sub-number {self.sub} outside 1-999")

    @property
    def parent(self) -> EntityId | None:
        """Family-level id for a sub-entity, None for top-level ids."""
        if self.sub is None:
            return None
        return EntityId(self.kind, self.family)

    def sort_key(self) -> tuple[int, int, int]:
        return (_KIND_RANK[self.kind], self.family, self.sub or 0)

    def __lt__(self, other: EntityId) -> bool:
        if not isinstance(other, EntityId):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_entity_id(self)


def parse_entity_id(text: str) -> EntityId:
    """Parse canonical id text; raise :class:`MalformedId` on anything else."""
    match = _ID_RE.fullmatch(text)
    if match is None:
        raise MalformedId(f"not a canonical entity id: {text!r}", subject=str(text))
    prefix, family, sub = match.groups()
    kind = PREFIX_KIND[prefix]
    if sub is None:
        return EntityId(kind, int(family))
    if kind not in SUB_KINDS:
        raise MalformedId(
            f"sub-number not allowed for prefix {prefix}: {text!r}", subject=text
        )
    if int(sub) == 0:
        raise MalformedId(f"sub-number must be 001-999: {text!r}", subject=text)
    return EntityId(kind, int(family), int(sub))


def format_entity_id(entity_id: EntityId) -> str:
    """Canonical text form; inverse of :func:`parse_entity_id`."""
    text = f"{KIND_PREFIX[entity_id.kind]}{entity_id.family:04d}"
    if entity_id.sub is not None:
        text += f".{entity_id.sub:03d}"
    return text


class SignalClass(str, Enum):
    """Broad observable family a detection pattern draws on."""

    CONTENT_ANALYSIS = "content-analysis"
    ACCOUNT_BEHAVIOR = "account-behavior"
    INFRASTRUCTURE = "infrastructure"
    FINANCIAL_FLOW = "financial-flow"


@dataclass(frozen=True)
class Phase:
    """One stage of the fraud kill chain; ``order`` is its 1-based position."""

    id: EntityId
    name: str
    description: str
    order: int


@dataclass(frozen=True)
class Tactic:
    """Attacker objective grouping techniques within a single phase."""

    id: EntityId
    name: str
    description: str
    phase_id: EntityId
    provisional: bool = False


@dataclass(frozen=True)
class TechniqueEntry:
    """A concrete fraud method, optionally a sub-technique of a family entry.

    ``provisional`` marks structural placeholders (e.g. a parent group whose
    upstream catalog entry is unpublished); provisional entries are excluded
    from scale counts and interchange exports.
    """

    id: EntityId
    name: str
    description: str
    phase_ids: frozenset[EntityId] = field(default_factory=frozenset)
    tactic_ids: frozenset[EntityId] = field(default_factory=frozenset)
    detection_ids: frozenset[EntityId] = field(default_factory=frozenset)
    mitigation_ids: frozenset[EntityId] = field(default_factory=frozenset)
    tool_ids: frozenset[EntityId] = field(default_factory=frozenset)
    provisional: bool = False

    @property
    def parent(self) -> EntityId | None:
        return self.id.parent


@dataclass(frozen=True)
class DetectionPattern:
    """Cataloged observable indicator associated with techniques."""

    id: EntityId
    name: str
    description: str
    signal_class: SignalClass
    provisional: bool = False

    @property
    def parent(self) -> EntityId | None:
        return self.id.parent


@dataclass(frozen=True)
class Mitigation:
    id: EntityId
    name: str
    description: str
    technique_ids: frozenset[EntityId] = field(default_factory=frozenset)
    provisional: bool = False


@dataclass(frozen=True)
class ToolEntry:
    id: EntityId
    name: str
    description: str
    technique_ids: frozenset[EntityId] = field(default_factory=frozenset)
    provisional: bool = False


Entity = Phase | Tactic | TechniqueEntry | DetectionPattern | Mitigation | ToolEntry

# Manifest/count bookkeeping uses these class names, in canonical order.
ENTITY_CLASSES = ("phases", "tactics", "techniques", "detections", "mitigations", "tools")


@dataclass(frozen=True)
class Manifest:
    """Declared per-class entity counts plus the corpus version string."""

    corpus_version: str
    phases: int = 0
    tactics: int = 0
    techniques: int = 0
    detections: int = 0
    mitigations: int = 0
    tools: int = 0

    def __post_init__(self):
        for cls in ENTITY_CLASSES:
            if getattr(self, cls) < 0:
                raise SchemaError(f"manifest count for {cls} must be >= 0, got {getattr(self, cls)}")

    def counts(self) -> dict[str, int]:
        return {cls: getattr(self, cls) for cls in ENTITY_CLASSES}
