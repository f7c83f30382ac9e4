import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dendrocut.fixtures import make_planted_blobs


@pytest.fixture(scope="session")
def planted():
    return make_planted_blobs(n=300, seed=7)


@pytest.fixture(scope="session")
def planted_small():
    return make_planted_blobs(n=90, seed=11)
