"""
Seeded random joint distributions
"""

from pathlib import Path

import numpy as np
import structlog

from liftfunnel.config import settings
from liftfunnel.core.errors import DimensionMismatch, RejectionOverflow
from liftfunnel.core.measures import JointDistribution, validate_joint

logger = structlog.get_logger()


def instance_rng(seed: int, instance_id: int) -> np.random.Generator:
    """Independent stream per instance, identical whatever order instances run in"""
    return np.random.default_rng([seed, instance_id])


def generate_joint(s_size: int, x_size: int, rng: np.random.Generator) -> JointDistribution:
    """Flat-Dirichlet P_SX, redrawn while any marginal falls below the floor"""
    if s_size < 2 or x_size < 2:
        raise DimensionMismatch(f"Alphabet sizes must be at least 2, got {s_size}x{x_size}")

    floor = settings.marginal_floor
    for attempt in range(settings.max_redraws):
        matrix = rng.dirichlet(np.ones(s_size * x_size)).reshape(s_size, x_size)
        if matrix.sum(axis=1).min() >= floor and matrix.sum(axis=0).min() >= floor:
            if attempt:
                logger.debug("Rejected joint draws", rejected=attempt)
            return validate_joint(matrix)
    raise RejectionOverflow(
        f"No {s_size}x{x_size} draw with marginals above {floor} in {settings.max_redraws} attempts"
    )


def write_joint(joint: JointDistribution, path: str):
    """Plain-text matrix, one row per s, space separated, full precision"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, joint.matrix, fmt=settings.float_format, delimiter=" ")


def read_joint(path: str) -> JointDistribution:
    return validate_joint(np.loadtxt(path, ndmin=2))
