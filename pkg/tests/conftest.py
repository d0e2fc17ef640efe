import json

import pytest

from fist.corpus import load_corpus
from fist.fixtures import load_case_incident, load_seed_corpus, seed_corpus_text
from fist.incident import IncidentStore, annotate_incident


@pytest.fixture(scope="session")
def seed_corpus():
    return load_seed_corpus()


@pytest.fixture()
def seed_document():
    """Fresh mutable copy of the seed corpus document."""
    return json.loads(seed_corpus_text())


@pytest.fixture(scope="session")
def case_flow(seed_corpus):
    return annotate_incident(seed_corpus, load_case_incident())


@pytest.fixture()
def store(tmp_path):
    return IncidentStore(tmp_path / "incidents")


def load_document(document, **kwargs):
    return load_corpus(json.dumps(document), **kwargs)
