from pathlib import Path

import pytest

from tonalgrams.corpus import load_corpus
from tonalgrams.encoding import encode_movement
from tonalgrams.fixtures import write_corpus

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fixture_manifest(tmp_path_factory):
    return write_corpus(tmp_path_factory.mktemp("corpus"), seed=0, movements=10, slices=200)


@pytest.fixture(scope="session")
def fixture_events(fixture_manifest):
    return [encode_movement(m) for m in load_corpus(fixture_manifest)]


@pytest.fixture(scope="session")
def fixture_sequences(fixture_events):
    return [[ev.csdc for ev in g] for g in fixture_events]
