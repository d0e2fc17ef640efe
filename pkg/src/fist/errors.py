"""Exception hierarchy shared across the package."""

from __future__ import annotations


class FistError(Exception):
    """Base class for all domain errors.

    Every error carries a machine-readable ``code`` and an optional
    ``subject`` (the entity or incident id the error is about) so API and
    CLI layers can render ``{code, message, subject}`` uniformly.
    """

    code = "FistError"

    def __init__(self, message: str, subject: str | None = None):
        super().__init__(message)
        self.subject = subject

    @property
    def message(self) -> str:
        return str(self)


class MalformedId(FistError):
    """An identifier string does not match the canonical grammar."""

    code = "MalformedId"


class SchemaError(FistError):
    """A document has the wrong shape (keys, types, enum values)."""

    code = "SchemaError"


class IntegrityError(FistError):
    """A corpus violates referential-integrity rules.

    ``violations`` holds the full list of :class:`fist.validator.Violation`
    records that caused the failure.
    """

    code = "IntegrityError"

    def __init__(self, message: str, subject: str | None = None, violations=()):
        super().__init__(message, subject)
        self.violations = tuple(violations)


class ScaleDrift(FistError):
    """Declared manifest counts disagree with corpus content."""

    code = "ScaleDrift"

    def __init__(self, message: str, subject: str | None = None, mismatches=()):
        super().__init__(message, subject)
        self.mismatches = tuple(mismatches)


class NotFound(FistError):
    code = "NotFound"


class DuplicateIncidentId(FistError):
    code = "DuplicateIncidentId"


class UnknownTechnique(FistError):
    code = "UnknownTechnique"


class PhaseMismatch(FistError):
    """Observation claims a phase the technique is not mapped to."""

    code = "PhaseMismatch"


class UnknownDetection(FistError):
    code = "UnknownDetection"
