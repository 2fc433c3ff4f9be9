"""
Validation of the ladder heuristic against the closed-form Example 1 mechanism
"""

from typing import List, Sequence

import numpy as np
import structlog

from liftfunnel.config import settings
from liftfunnel.core.errors import OutOfRange
from liftfunnel.core.measures import mechanism_leakage, mechanism_utility
from liftfunnel.core.mechanisms import (
    EXAMPLE1_MAX_EPSILON,
    algorithm1,
    example1_joint,
    example1_theoretical,
)
from liftfunnel.schemas import Example1Report, Example1Row, MeasureKind, SweepConfig
from liftfunnel.utils.validation import arithmetic_grid

logger = structlog.get_logger()


def dense_grid(eps_grid: Sequence[float]) -> List[float]:
    """Requested budgets merged into the fixed lattice below their maximum"""
    top = max(eps_grid)
    step = settings.example1_lattice_step
    lattice = arithmetic_grid(step, top, step) if top >= step else []
    return sorted({round(e, 12) for e in list(eps_grid) + lattice})


def example1_sweep_config(eps_grid: Sequence[float]) -> SweepConfig:
    return SweepConfig.from_grid(
        dense_grid(eps_grid),
        refinement=5,
        final_refinement=settings.example1_final_refinement,
        delta=0.05,
        epsilon_end=settings.example1_epsilon_end,
    )


def validate_example1(eps_grid: Sequence[float]) -> Example1Report:
    """Per-epsilon gaps between the chi-square heuristic and the closed form"""
    eps_grid = list(eps_grid)
    if not eps_grid:
        raise OutOfRange("No epsilon values given")
    for eps in eps_grid:
        if not 0.0 < eps <= EXAMPLE1_MAX_EPSILON:
            raise OutOfRange(f"Example 1 holds for 0 < epsilon <= {EXAMPLE1_MAX_EPSILON}, got {eps!r}")

    joint = example1_joint()
    cfg = example1_sweep_config(eps_grid)
    points = {round(p.epsilon, 12): p for p in algorithm1(joint, MeasureKind.CHI_SQ, cfg)}

    tolerance = settings.example1_tolerance
    rows = []
    for eps in eps_grid:
        point = points[round(eps, 12)]
        theoretical = example1_theoretical(eps)
        utility = mechanism_utility(joint, theoretical).mi_xy
        leakage = mechanism_leakage(joint, theoretical)
        gap = abs(point.utility - utility)
        row = Example1Row(
            epsilon=eps,
            utility_algorithm=point.utility,
            utility_theoretical=utility,
            utility_gap=gap,
            max_chi_sq_algorithm=point.max_measure,
            max_chi_sq_theoretical=leakage.max_chi_sq,
            chi_sq_gap=abs(point.max_measure - leakage.max_chi_sq),
            max_lift_algorithm=point.max_lift,
            max_lift_theoretical=leakage.max_lift,
            max_lift_gap=abs(point.max_lift - leakage.max_lift),
            flagged=gap > tolerance,
        )
        if row.flagged:
            logger.warning("Example 1 utility mismatch", epsilon=eps, gap=gap, tolerance=tolerance)
        rows.append(row)
    return Example1Report(rows=rows, tolerance=tolerance)
