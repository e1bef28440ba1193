import random

import pytest
from hypothesis import HealthCheck, settings

from abem.graph import Snapshot

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def path3() -> Snapshot:
    """a - b - c line graph as nodes 0 - 1 - 2."""
    return Snapshot(0, [0, 1, 2], [(0, 1), (1, 2)])


@pytest.fixture
def triangle() -> Snapshot:
    return Snapshot(0, [0, 1, 2], [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def star5() -> Snapshot:
    """Center 0 with five leaves 1..5."""
    return Snapshot(0, range(6), [(0, i) for i in range(1, 6)])


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xABE)
