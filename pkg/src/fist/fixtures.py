"""Access to the bundled seed corpus and case-study incident."""

from __future__ import annotations

from importlib import resources

from .corpus import Corpus, load_corpus
from .incident import IncidentFlow, flow_from_json


def _read(name: str) -> str:
    return resources.files("fist").joinpath(f"data/{name}").read_text(encoding="utf-8")


def seed_corpus_text() -> str:
    return _read("seed_corpus.json")


def load_seed_corpus() -> Corpus:
    return load_corpus(seed_corpus_text())


def case_incident_text() -> str:
    return _read("case_incident.json")


def load_case_incident() -> IncidentFlow:
    """The investment-fraud case study, thirteen observations with hits."""
    return flow_from_json(case_incident_text())
