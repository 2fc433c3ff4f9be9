"""
Shared fixtures
"""

import numpy as np
import pytest

from liftfunnel.core.measures import validate_joint
from liftfunnel.core.mechanisms import example1_joint


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ex1_joint():
    return example1_joint()


@pytest.fixture
def uniform_joint():
    return validate_joint(np.full((2, 2), 0.25))


@pytest.fixture
def small_joint():
    """3x4 joint with clearly correlated S and X"""
    return validate_joint([
        [0.10, 0.02, 0.05, 0.08],
        [0.03, 0.15, 0.04, 0.05],
        [0.02, 0.03, 0.21, 0.22],
    ])


def random_joint(rng, s_size, x_size, floor=1e-3):
    while True:
        matrix = rng.dirichlet(np.ones(s_size * x_size)).reshape(s_size, x_size)
        if matrix.sum(axis=1).min() >= floor and matrix.sum(axis=0).min() >= floor:
            return validate_joint(matrix)
