import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

DATA = Path(__file__).with_name("data")


@pytest.fixture(scope="session")
def oracle():
    with open(DATA / "oracle_values.json", encoding="utf-8") as fh:
        return json.load(fh)
