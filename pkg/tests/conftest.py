import json
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def frozen():
    return json.loads(Path(__file__).with_name("frozen_oracle.json").read_text())
