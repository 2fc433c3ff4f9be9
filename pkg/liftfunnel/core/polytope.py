"""
Max-lift polytope and exact vertex enumeration

The polytope for a lift bound beta is

    { W : sum_x W_x = 1, W_x >= 0, sum_x (P_{S|X}(s|x) / P_S(s)) W_x <= beta for all s }

Vertices are found by active-set enumeration: every choice of |X|-1
inequality rows is made tight and solved together with the simplex
equality. Constraint indices 0..|X|-1 are the nonnegativity rows (W_x = 0),
indices |X|..|X|+|S|-1 are the lift rows.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Tuple

import numpy as np
import structlog

from liftfunnel.config import settings
from liftfunnel.core.errors import DimensionMismatch, EmptyVertexSet, InvalidBound
from liftfunnel.core.measures import JointDistribution

logger = structlog.get_logger()


@dataclass(frozen=True)
class MaxLiftPolytope:
    """Constraint system of the max-lift polytope for one bound"""
    lift_rows: np.ndarray
    bound: float

    @property
    def dimension(self) -> int:
        return self.lift_rows.shape[1]

    @property
    def num_constraints(self) -> int:
        return self.dimension + self.lift_rows.shape[0]

    def inequalities(self) -> Tuple[np.ndarray, np.ndarray]:
        """(G, h) with the polytope written as G W <= h plus the simplex equality"""
        n = self.dimension
        g = np.vstack([-np.eye(n), self.lift_rows])
        h = np.concatenate([np.zeros(n), np.full(self.lift_rows.shape[0], self.bound)])
        return g, h


@dataclass(frozen=True)
class VertexSet:
    """Deduplicated vertices, lexicographically sorted, with their tight constraints"""
    vertices: np.ndarray
    active_sets: Tuple[Tuple[int, ...], ...]

    def __len__(self) -> int:
        return self.vertices.shape[0]


def build_polytope(joint: JointDistribution, bound: float) -> MaxLiftPolytope:
    """Polytope of columns whose lifts stay below `bound`"""
    if not bound > 1.0:
        raise InvalidBound(f"Lift bound must exceed 1, got {bound!r}")
    lift_rows = joint.lift_matrix.copy()
    lift_rows.setflags(write=False)
    return MaxLiftPolytope(lift_rows=lift_rows, bound=float(bound))


def lexsort_rows(rows: np.ndarray) -> np.ndarray:
    """Rows in lexicographic order, first coordinate most significant"""
    if rows.shape[0] == 0:
        return rows
    return rows[np.lexsort(rows.T[::-1])]


def dedup_rows(rows: np.ndarray, tolerance: float) -> np.ndarray:
    """Sort rows lexicographically and drop any row within L-inf `tolerance` of a kept one"""
    rows = lexsort_rows(rows)
    kept = []
    for row in rows:
        if kept and np.min(np.max(np.abs(np.asarray(kept) - row), axis=1)) <= tolerance:
            continue
        kept.append(row)
    if not kept:
        return rows[:0]
    return np.asarray(kept)


def enumerate_vertices(poly: MaxLiftPolytope) -> VertexSet:
    """Exact vertex set of the polytope"""
    n = poly.dimension
    g, h = poly.inequalities()
    slack = settings.feasibility_slack

    active = np.array(list(combinations(range(poly.num_constraints), n - 1)), dtype=int)
    systems = np.empty((active.shape[0], n, n))
    systems[:, 0, :] = 1.0
    systems[:, 1:, :] = g[active]
    rhs = np.empty((active.shape[0], n))
    rhs[:, 0] = 1.0
    rhs[:, 1:] = h[active]

    # Rank-deficient active sets do not define a vertex
    singular_values = np.linalg.svd(systems, compute_uv=False)
    regular = singular_values[:, -1] > settings.pivot_threshold * singular_values[:, 0]

    points = np.linalg.solve(systems[regular], rhs[regular][..., None])[..., 0]
    feasible = np.all(points @ g.T <= h + slack, axis=1)
    points = np.clip(points[feasible], 0.0, None)
    points = points / points.sum(axis=1, keepdims=True)

    vertices = dedup_rows(points, settings.vertex_dedup_tolerance)
    if vertices.shape[0] == 0:
        raise EmptyVertexSet(f"No vertex survived for bound {poly.bound!r}")

    tight = np.abs(vertices @ g.T - h) <= slack
    active_sets = tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in tight)
    vertices.setflags(write=False)

    logger.debug(
        "Enumerated polytope vertices",
        bound=poly.bound,
        active_sets=int(active.shape[0]),
        regular=int(regular.sum()),
        vertices=int(vertices.shape[0]),
    )
    return VertexSet(vertices=vertices, active_sets=active_sets)


def contains(poly: MaxLiftPolytope, w) -> bool:
    """Membership test with feasibility slack"""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size != poly.dimension:
        raise DimensionMismatch(f"Column has shape {w.shape}, polytope dimension is {poly.dimension}")
    slack = settings.feasibility_slack
    return bool(np.all(w >= -slack) and np.all(poly.lift_rows @ w <= poly.bound + slack))
