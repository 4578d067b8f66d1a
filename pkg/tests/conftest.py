import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def oracles():
    with open(FIXTURES / "oracles.json") as fh:
        return json.load(fh)
