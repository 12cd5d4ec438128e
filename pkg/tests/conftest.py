"""
🧪 Shared fixtures
"""

import numpy as np
import pytest

from src.models import SolverSettings


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def solver() -> SolverSettings:
    return SolverSettings(tolerance=1e-11, max_iterations=5000)


@pytest.fixture
def random_channels():
    """N x K i.i.d. CN(0, 1) channel matrix factory"""

    def make(rng: np.random.Generator, N: int, K: int) -> np.ndarray:
        return (rng.standard_normal((N, K)) +
                1j * rng.standard_normal((N, K))) / np.sqrt(2)

    return make
