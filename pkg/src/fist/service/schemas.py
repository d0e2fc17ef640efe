"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ObservationIn(BaseModel):
    technique: str
    phase: str
    observed_behavior: str = ""
    detection_hits: list[str] = Field(default_factory=list)
    observed_at: str | None = None


class IncidentIn(BaseModel):
    incident_id: str
    title: str
    summary: str = ""
    observations: list[ObservationIn] = Field(default_factory=list)


class ObservationOut(BaseModel):
    sequence: int
    technique: str
    phase: str
    observed_behavior: str
    detection_hits: list[str]
    observed_at: str | None = None


class IncidentOut(BaseModel):
    incident_id: str
    title: str
    summary: str
    created_at: str
    observations: list[ObservationOut]


class GapOut(BaseModel):
    technique_id: str
    reason: str


class CoverageOut(BaseModel):
    phase_coverage: float
    phases_hit: list[str]
    detection_opportunity: float
    detection_realized: float
    gaps: list[GapOut]


class ManifestOut(BaseModel):
    corpus_version: str
    source_digest: str
    declared: dict[str, int]
    actual: dict[str, int]


class ErrorOut(BaseModel):
    code: str
    message: str
    subject: str | None = None
