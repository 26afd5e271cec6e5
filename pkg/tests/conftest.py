from pathlib import Path

import pytest

from shaperex.corpus import read_jsonl
from shaperex.shapes import load_shape

DATA_DIR = Path(__file__).parent / "data"
FIXTURE200 = DATA_DIR / "fixture200.jsonl"


@pytest.fixture(scope="session")
def person_shape():
    return load_shape()


@pytest.fixture(scope="session")
def fixture200():
    return list(read_jsonl(FIXTURE200))
