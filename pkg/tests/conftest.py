"""Shared fixtures and hypothesis settings."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_symmetric(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    x = rng.normal(size=(dim, dim)) * scale
    return (x + x.T) / 2


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
