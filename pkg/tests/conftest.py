import os

import pytest

from claimgraph.ingest import parse_corpus_file

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
LANDMARK_PATH = os.path.join(DATA_DIR, "landmark_corpus.jsonl")


@pytest.fixture(scope="session")
def landmark_records():
    records, diagnostics = parse_corpus_file(LANDMARK_PATH)
    assert not diagnostics, [str(d) for d in diagnostics]
    return {r.paper_id: r for r in records}


@pytest.fixture(scope="session")
def landmark_path():
    return LANDMARK_PATH
