"""
Entropy-minimizing mixture linear program

    min_q  sum_i q_i h(W^i)
    s.t.   sum_i q_i W^i = P_X,  q >= 0

The normalization sum_i q_i = 1 is implied by the mixture rows because every
candidate and the target sum to one, so it is not added as a separate row.
Solved with a dense two-phase simplex method under Bland's rule so the
returned solution is basic.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import structlog

from liftfunnel.config import settings
from liftfunnel.core.errors import DimensionMismatch, Infeasible, LPError
from liftfunnel.core.measures import row_entropies, validate_prob_vector

logger = structlog.get_logger()


@dataclass(frozen=True)
class MixtureLP:
    """Candidates W^i (one per row), their entropies and the target P_X"""
    candidates: np.ndarray
    costs: np.ndarray
    target: np.ndarray

    @property
    def size(self) -> int:
        return self.candidates.shape[0]


@dataclass(frozen=True)
class Mechanism:
    """Output distribution P_Y and columns P_{X|Y}(.|y), one row per output symbol"""
    p_y: np.ndarray
    columns: np.ndarray

    @property
    def output_size(self) -> int:
        return self.p_y.shape[0]

    @property
    def x_size(self) -> int:
        return self.columns.shape[1]

    def mixture(self) -> np.ndarray:
        """sum_y P_Y(y) P_{X|Y}(.|y), which reproduces P_X"""
        return self.p_y @ self.columns

    def channel(self) -> np.ndarray:
        """P_{Y|X} as deployed, rows y and columns x"""
        joint_xy = self.p_y[:, None] * self.columns
        return joint_xy / self.mixture()[None, :]

    def apply(self, x: int, rng: np.random.Generator) -> int:
        """Draw an output symbol for input symbol x"""
        probabilities = self.channel()[:, x]
        return int(rng.choice(self.output_size, p=probabilities / probabilities.sum()))


def build_mixture_lp(candidates, target) -> MixtureLP:
    """Validate candidates, drop duplicates (first occurrence kept) and attach entropies"""
    target = validate_prob_vector(target)
    rows = np.atleast_2d(np.asarray(candidates, dtype=float))
    if rows.shape[0] == 0:
        raise LPError("Mixture LP needs at least one candidate")
    if rows.shape[1] != target.size:
        raise DimensionMismatch(f"Candidates have {rows.shape[1]} entries, target has {target.size}")
    rows = np.vstack([validate_prob_vector(row, settings.construction_tolerance) for row in rows])

    tolerance = settings.candidate_dedup_tolerance
    kept: List[np.ndarray] = []
    for row in rows:
        if kept and np.min(np.max(np.abs(np.asarray(kept) - row), axis=1)) <= tolerance:
            continue
        kept.append(row)
    unique = np.asarray(kept)
    return MixtureLP(candidates=unique, costs=row_entropies(unique), target=target)


class TwoPhaseSimplex:
    """Dense tableau simplex for min c.q s.t. A q = b, q >= 0 with b >= 0"""

    def __init__(self, a: np.ndarray, b: np.ndarray, c: np.ndarray, max_iterations: Optional[int] = None):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.tol = settings.pivot_threshold
        self.max_iterations = max_iterations or 50 * (self.a.shape[0] + self.a.shape[1]) ** 2
        self.iterations = 0

    @staticmethod
    def _pivot(tableau: np.ndarray, row: int, col: int):
        tableau[row, :] /= tableau[row, col]
        for r in range(tableau.shape[0]):
            if r != row and tableau[r, col] != 0.0:
                tableau[r, :] -= tableau[r, col] * tableau[row, :]

    def _enter(self, tableau: np.ndarray, basis: List[int], cost: np.ndarray, allowed: int) -> int:
        # Bland: lowest-index column with a negative reduced cost
        reduced = cost[:allowed] - cost[basis] @ tableau[:, :allowed]
        candidates = np.flatnonzero(reduced < -self.tol)
        return int(candidates[0]) if candidates.size else -1

    def _leave(self, tableau: np.ndarray, basis: List[int], col: int) -> int:
        column = tableau[:, col]
        rows = np.flatnonzero(column > self.tol)
        if rows.size == 0:
            return -1
        ratios = tableau[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        # Bland: among tied rows, the one whose basic variable has the lowest index
        return int(min(ties, key=lambda r: basis[r]))

    def _run(self, tableau: np.ndarray, basis: List[int], cost: np.ndarray, allowed: int):
        while True:
            if self.iterations >= self.max_iterations:
                raise LPError(f"Simplex did not terminate within {self.max_iterations} pivots")
            col = self._enter(tableau, basis, cost, allowed)
            if col < 0:
                return
            row = self._leave(tableau, basis, col)
            if row < 0:
                raise LPError("Mixture LP is unbounded")
            self._pivot(tableau, row, col)
            basis[row] = col
            self.iterations += 1

    def solve(self) -> np.ndarray:
        m, n = self.a.shape

        # Phase 1: artificial basis
        tableau = np.hstack([self.a, np.eye(m), self.b[:, None]])
        basis = list(range(n, n + m))
        phase1_cost = np.concatenate([np.zeros(n), np.ones(m), [0.0]])
        self._run(tableau, basis, phase1_cost, n + m)

        residual = float(phase1_cost[basis] @ tableau[:, -1])
        if residual > settings.distribution_tolerance:
            raise Infeasible(f"No convex combination reproduces the target (residual {residual:.3e})")

        # Drive remaining artificials out of the basis; rows where that fails are redundant
        redundant = []
        for row, var in enumerate(basis):
            if var < n:
                continue
            nonzero = np.flatnonzero(np.abs(tableau[row, :n]) > self.tol)
            if nonzero.size:
                self._pivot(tableau, row, int(nonzero[0]))
                basis[row] = int(nonzero[0])
            else:
                redundant.append(row)
        keep_rows = [r for r in range(m) if r not in redundant]
        tableau = tableau[keep_rows][:, list(range(n)) + [n + m]]
        basis = [basis[r] for r in keep_rows]

        # Phase 2
        self._run(tableau, basis, np.concatenate([self.c, [0.0]]), n)

        q = np.zeros(n)
        q[basis] = tableau[:, -1]
        return self._polish(q, basis)

    def _polish(self, q: np.ndarray, basis: List[int]) -> np.ndarray:
        """Re-solve the basic system directly to shed accumulated pivoting error"""
        refined, *_ = np.linalg.lstsq(self.a[:, basis], self.b, rcond=None)
        if np.all(refined >= -settings.distribution_tolerance):
            q = np.zeros_like(q)
            q[basis] = refined
        return np.clip(q, 0.0, None)


def solve_mixture(lp: MixtureLP) -> np.ndarray:
    """Optimal basic weights q over lp.candidates"""
    solver = TwoPhaseSimplex(lp.candidates.T, lp.target, lp.costs)
    q = solver.solve()
    logger.debug(
        "Solved mixture LP",
        candidates=lp.size,
        pivots=solver.iterations,
        support=int(np.count_nonzero(q > settings.weight_threshold)),
        objective=float(q @ lp.costs),
    )
    return q


def extract_mechanism(q, lp: MixtureLP) -> Mechanism:
    """Keep the candidates with positive weight as output symbols"""
    q = np.asarray(q, dtype=float)
    if q.shape != (lp.size,):
        raise DimensionMismatch(f"Weights have shape {q.shape}, LP has {lp.size} candidates")
    support = np.flatnonzero(q > settings.weight_threshold)
    if support.size == 0:
        raise LPError("Weight vector has empty support")
    p_y = q[support] / q[support].sum()
    columns = lp.candidates[support].copy()
    p_y.setflags(write=False)
    columns.setflags(write=False)
    return Mechanism(p_y=p_y, columns=columns)


def optimal_mixture(candidates, target) -> Mechanism:
    """Build, solve and extract in one step"""
    lp = build_mixture_lp(candidates, target)
    return extract_mechanism(solve_mixture(lp), lp)
