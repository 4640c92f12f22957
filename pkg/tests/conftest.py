import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cmlyrics.langid import LangResources

RESOURCE_DIR = Path(__file__).parent.parent / "src" / "cmlyrics" / "resources"
SAMPLE_CORPUS = RESOURCE_DIR / "sample_corpus.jsonl"
SAMPLE_TAGGED = RESOURCE_DIR / "sample_tagged.tsv"


@pytest.fixture(scope="session")
def res():
    return LangResources.load()
