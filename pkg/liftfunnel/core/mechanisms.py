"""
Privacy mechanisms for lift-based measures

`optimal_maxlift_mechanism` decomposes P_X over the vertices of the max-lift
polytope with minimum conditional entropy. `algorithm1` enlarges that
candidate set with vertices of looser polytopes whose measure lands just
under the budget, carrying every solution forward to larger budgets.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence
import math
import time

import numpy as np
import structlog

from liftfunnel.config import settings
from liftfunnel.core.errors import OutOfRange, ValidationError
from liftfunnel.core.measures import (
    ColumnCandidate,
    JointDistribution,
    LeakageReport,
    column_stats,
    mechanism_leakage,
    mechanism_utility,
    to_candidates,
    validate_joint,
)
from liftfunnel.core.mixture_lp import Mechanism, optimal_mixture
from liftfunnel.core.polytope import VertexSet, build_polytope, dedup_rows, enumerate_vertices
from liftfunnel.schemas import MeasureKind, SweepConfig
from liftfunnel.utils.validation import validate_epsilon_grid

logger = structlog.get_logger()

EXAMPLE1_COEFFICIENT = 3.2048
EXAMPLE1_MAX_EPSILON = 0.07
EXAMPLE1_CHANNEL = ((0.25, 0.4), (0.75, 0.6))
EXAMPLE1_P_X = (0.25, 0.75)


@dataclass(frozen=True)
class SweepPoint:
    """Mechanism chosen for one budget and its metrics"""
    epsilon: float
    kind: MeasureKind
    mechanism: Mechanism
    utility: float
    normalized_utility: float
    leakage_mi: float
    max_lift: float
    max_measure: float
    candidate_count: int
    leakage: LeakageReport
    wall_time_ms: float = 0.0

    @property
    def budget(self) -> float:
        return self.kind.budget(self.epsilon)

    @property
    def display_leakage(self) -> float:
        return self.kind.display(self.max_measure)

    def within_budget(self, tolerance: float = settings.distribution_tolerance) -> bool:
        if self.max_measure > self.budget + tolerance:
            return False
        if self.kind is MeasureKind.SEMI_MI and self.leakage_mi > self.epsilon + tolerance:
            return False
        return True


def evaluate_mechanism(
    joint: JointDistribution,
    kind: MeasureKind,
    epsilon: float,
    mechanism: Mechanism,
    candidate_count: int,
    wall_time_ms: float = 0.0,
) -> SweepPoint:
    """Attach utility and leakage metrics to a mechanism"""
    utility = mechanism_utility(joint, mechanism)
    leakage = mechanism_leakage(joint, mechanism)
    return SweepPoint(
        epsilon=epsilon,
        kind=kind,
        mechanism=mechanism,
        utility=utility.mi_xy,
        normalized_utility=utility.normalized,
        leakage_mi=leakage.mi_sy,
        max_lift=leakage.max_lift,
        max_measure=getattr(leakage, f"max_{kind.value}"),
        candidate_count=candidate_count,
        leakage=leakage,
        wall_time_ms=wall_time_ms,
    )


def _check_epsilon(epsilon: float):
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise OutOfRange(f"Privacy budget must be positive, got {epsilon!r}")


def optimal_maxlift_mechanism(
    joint: JointDistribution,
    epsilon: float,
    kind: MeasureKind = MeasureKind.SEMI_MI,
) -> SweepPoint:
    """Utility-optimal mechanism whose lifts stay below kind.lift_bound(epsilon)"""
    _check_epsilon(epsilon)
    started = time.perf_counter()
    vertex_set = enumerate_vertices(build_polytope(joint, kind.lift_bound(epsilon)))
    mechanism = optimal_mixture(vertex_set.vertices, joint.p_x)
    elapsed = (time.perf_counter() - started) * 1000.0
    return evaluate_mechanism(joint, kind, epsilon, mechanism, len(vertex_set), elapsed)


def harvest_candidates(
    joint: JointDistribution,
    grid_eps: Sequence[float],
    kind: MeasureKind,
    max_workers: Optional[int] = None,
) -> Dict[float, VertexSet]:
    """Vertex set of the max-lift polytope at every ladder point"""
    ok, errors = validate_epsilon_grid(list(grid_eps))
    if not ok:
        raise ValidationError("; ".join(errors))

    workers = max_workers if max_workers is not None else settings.harvest_workers

    def harvest(eps: float) -> VertexSet:
        return enumerate_vertices(build_polytope(joint, kind.lift_bound(eps)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            vertex_sets = list(executor.map(harvest, grid_eps))
    else:
        vertex_sets = [harvest(eps) for eps in grid_eps]

    logger.debug(
        "Harvested ladder vertices",
        kind=kind.value,
        ladder_points=len(grid_eps),
        vertices=sum(len(v) for v in vertex_sets),
    )
    return dict(zip(grid_eps, vertex_sets))


def _band_mask(values: np.ndarray, kind: MeasureKind, epsilon_i: float, delta: float) -> np.ndarray:
    upper = kind.budget(epsilon_i)
    return (values >= (1.0 - delta) * upper) & (values <= upper)


def filter_band(
    candidates: VertexSet,
    joint: JointDistribution,
    kind: MeasureKind,
    epsilon_i: float,
    delta: float,
) -> List[ColumnCandidate]:
    """Vertices whose measure lies in [(1 - delta) budget, budget]"""
    if not 0.0 < delta < 1.0:
        raise OutOfRange(f"delta must lie in (0, 1), got {delta!r}")
    _check_epsilon(epsilon_i)
    if len(candidates) == 0:
        return []
    stats = column_stats(joint, candidates.vertices)
    mask = _band_mask(stats.measure(kind.value), kind, epsilon_i, delta)
    return [c for c, keep in zip(to_candidates(stats), mask) if keep]


@dataclass(frozen=True)
class _LadderBlock:
    """Harvested vertices of all ladder points belonging to one budget interval"""
    vertices: np.ndarray
    measures: np.ndarray


def _ladder_blocks(
    joint: JointDistribution,
    kind: MeasureKind,
    ladder: List[List[float]],
    harvested: Dict[float, VertexSet],
) -> List[_LadderBlock]:
    blocks = []
    for points in ladder:
        stacked = [harvested[eps].vertices for eps in points]
        vertices = np.vstack(stacked) if stacked else np.empty((0, joint.x_size))
        measures = column_stats(joint, vertices).measure(kind.value) if len(vertices) else np.empty(0)
        blocks.append(_LadderBlock(vertices=vertices, measures=measures))
    return blocks


def algorithm1(
    joint: JointDistribution,
    kind: MeasureKind,
    cfg: SweepConfig,
    harvest_workers: Optional[int] = None,
) -> List[SweepPoint]:
    """
    Candidate-ladder heuristic, one SweepPoint per budget in cfg.epsilons.

    For budget i the LP sees the columns of the max-lift mechanism at eps_i,
    the columns chosen at eps_{i-1}, and every harvested vertex from ladder
    intervals k >= i whose measure falls in the delta band below the budget.
    """
    ladder = cfg.ladder()
    grid = sorted({eps for points in ladder for eps in points})
    harvested = harvest_candidates(joint, grid, kind, harvest_workers)
    blocks = _ladder_blocks(joint, kind, ladder, harvested)

    carried = np.empty((0, joint.x_size))
    points: List[SweepPoint] = []
    for i, eps in enumerate(cfg.epsilons):
        started = time.perf_counter()
        initial = optimal_maxlift_mechanism(joint, eps, kind).mechanism.columns

        banded = [
            block.vertices[_band_mask(block.measures, kind, eps, cfg.delta)]
            for block in blocks[i:]
        ]
        pool = dedup_rows(np.vstack([initial, carried, *banded]), settings.candidate_dedup_tolerance)
        mechanism = optimal_mixture(pool, joint.p_x)
        elapsed = (time.perf_counter() - started) * 1000.0

        point = evaluate_mechanism(joint, kind, eps, mechanism, pool.shape[0], elapsed)
        if not point.within_budget():
            logger.warning(
                "Mechanism exceeds budget",
                kind=kind.value,
                epsilon=eps,
                max_measure=point.max_measure,
                budget=point.budget,
            )
        logger.info(
            "Algorithm step",
            kind=kind.value,
            epsilon=eps,
            candidate_count=point.candidate_count,
            banded=int(sum(b.shape[0] for b in banded)),
            utility=point.utility,
            outputs=mechanism.output_size,
        )
        points.append(point)
        carried = mechanism.columns
    return points


def example1_joint() -> JointDistribution:
    """Binary fixture with P_{S|X} = [[0.25, 0.4], [0.75, 0.6]] and P_X = [0.25, 0.75]"""
    channel = np.asarray(EXAMPLE1_CHANNEL)
    return validate_joint(channel * np.asarray(EXAMPLE1_P_X)[None, :])


def example1_theoretical(epsilon: float) -> Mechanism:
    """Closed-form small-budget chi-square mechanism for the Example 1 fixture"""
    if not 0.0 < epsilon <= EXAMPLE1_MAX_EPSILON:
        raise OutOfRange(f"Closed form holds for 0 < epsilon <= {EXAMPLE1_MAX_EPSILON}, got {epsilon!r}")
    shift = EXAMPLE1_COEFFICIENT * epsilon
    p0, p1 = EXAMPLE1_P_X
    columns = np.array([[p0 - shift, p1 + shift], [p0 + shift, p1 - shift]])
    p_y = np.array([0.5, 0.5])
    columns.setflags(write=False)
    p_y.setflags(write=False)
    return Mechanism(p_y=p_y, columns=columns)
