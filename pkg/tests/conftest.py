import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from pcp.graph import Dag

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

A, B, C, D, E, F = range(6)


@pytest.fixture
def five_vertex_dag():
    # A->E, A->C, A->D, C->E, D->E, B->C, B->E, C->D
    return Dag(5, [(A, E), (A, C), (A, D), (C, E), (D, E), (B, C), (B, E), (C, D)])
