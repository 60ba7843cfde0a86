"""Shared fixtures."""

import pytest

from ptcavity.model.types import SystemParams


@pytest.fixture
def default_params() -> SystemParams:
    """Default parameter set (delta = 32 GHz, below threshold at G = g)."""
    return SystemParams()


@pytest.fixture
def above_threshold() -> SystemParams:
    """Resonant point well above threshold: rho = (25/1.69)(25/9) ~ 41."""
    return SystemParams(delta=0.0, G=5.0)
