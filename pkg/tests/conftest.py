"""Shared pytest configuration: hypothesis profile and data fixtures."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

import gieskit as gk

settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def sim5():
    """One p=5 scenario with two singleton targets, shared where only a
    well-formed dataset is needed."""
    return gk.simulate(gk.SimConfig(p=5, s=0.5, k=2, m=1, n=400, seed=11))


@pytest.fixture(scope="session")
def data5(sim5):
    return sim5.data
