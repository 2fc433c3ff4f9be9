"""
Discrete probability kernels and lift-based leakage measures

All quantities are in nats. Columns W are candidate conditionals P_{X|Y}(.|y);
the posterior they induce is P_{S|Y}(s|y) = sum_x P_{S|X}(s|x) W_x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np
import structlog

from liftfunnel.config import settings
from liftfunnel.core.errors import (
    DimensionMismatch,
    MixtureMismatch,
    NegativeEntry,
    NotNormalized,
    ZeroMarginal,
)

if TYPE_CHECKING:
    from liftfunnel.core.mixture_lp import Mechanism

logger = structlog.get_logger()

ArrayLike = Union[Sequence[float], Sequence[Sequence[float]], np.ndarray]


@dataclass(frozen=True)
class JointDistribution:
    """Ground-truth P_SX with cached marginals and the channel P_{S|X}"""
    matrix: np.ndarray
    p_s: np.ndarray
    p_x: np.ndarray
    channel: np.ndarray

    @property
    def s_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def x_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def lift_matrix(self) -> np.ndarray:
        """Entries P_{S|X}(s|x) / P_S(s), one row per s"""
        return self.channel / self.p_s[:, None]

    @property
    def entropy_x(self) -> float:
        return entropy(self.p_x)


@dataclass(frozen=True)
class PosteriorStats:
    """Leakage of a single column"""
    posterior: np.ndarray
    lifts: np.ndarray
    max_lift: float
    semi_mi: float
    ell_one: float
    chi_sq: float


@dataclass(frozen=True)
class ColumnStats:
    """Leakage of a stack of columns, one entry per row of `columns`"""
    columns: np.ndarray
    posteriors: np.ndarray
    lifts: np.ndarray
    max_lift: np.ndarray
    semi_mi: np.ndarray
    ell_one: np.ndarray
    chi_sq: np.ndarray

    def measure(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def __len__(self) -> int:
        return self.columns.shape[0]


@dataclass(frozen=True)
class ColumnCandidate:
    """A candidate P_{X|Y}(.|y) with its cached leakage statistics"""
    column: np.ndarray
    max_lift: float
    semi_mi: float
    ell_one: float
    chi_sq: float

    def measure(self, name: str) -> float:
        return getattr(self, name)


@dataclass(frozen=True)
class LeakageReport:
    """Average leakages and per-output maxima of a mechanism"""
    mi_sy: float
    tv: float
    avg_chi_sq: float
    max_lift: float
    max_semi_mi: float
    max_ell_one: float
    max_chi_sq: float


@dataclass(frozen=True)
class UtilityReport:
    mi_xy: float
    normalized: float


def validate_prob_vector(entries: ArrayLike, tolerance: float = settings.input_tolerance) -> np.ndarray:
    """Check a probability vector and return it renormalized to sum exactly one"""
    p = np.asarray(entries, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DimensionMismatch(f"Expected a non-empty 1-D vector, got shape {p.shape}")
    if np.any(p < 0):
        raise NegativeEntry(f"Negative probability {p.min():.3e}")
    total = p.sum()
    if abs(total - 1.0) > tolerance:
        raise NotNormalized(f"Probabilities sum to {total:.12g}")
    return p / total


def validate_joint(matrix: ArrayLike, tolerance: float = settings.input_tolerance) -> JointDistribution:
    """Validate P_SX (rows s, columns x) and cache P_S, P_X and P_{S|X}"""
    arr = np.array(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] < 2:
        raise DimensionMismatch(f"Joint must be at least 2x2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NotNormalized("Joint contains non-finite entries")
    if np.any(arr < 0):
        raise NegativeEntry(f"Negative joint entry {arr.min():.3e}")
    total = arr.sum()
    if abs(total - 1.0) > tolerance:
        raise NotNormalized(f"Joint sums to {total:.12g}")
    arr = arr / total

    p_s = arr.sum(axis=1)
    p_x = arr.sum(axis=0)
    if np.any(p_s <= 0):
        raise ZeroMarginal(f"P_S vanishes at s={int(np.argmin(p_s))}")
    if np.any(p_x <= 0):
        raise ZeroMarginal(f"P_X vanishes at x={int(np.argmin(p_x))}")

    channel = arr / p_x[None, :]
    for array in (arr, p_s, p_x, channel):
        array.setflags(write=False)
    return JointDistribution(matrix=arr, p_s=p_s, p_x=p_x, channel=channel)


def entropy(p: ArrayLike) -> float:
    """Shannon entropy in nats with 0 log 0 = 0"""
    p = validate_prob_vector(p)
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log(nz))))


def row_entropies(columns: np.ndarray) -> np.ndarray:
    """Entropy of each row of a stack of probability vectors"""
    columns = np.asarray(columns, dtype=float)
    safe = np.where(columns > 0, columns, 1.0)
    return np.maximum(0.0, -np.sum(columns * np.log(safe), axis=-1))


def mutual_information(joint: JointDistribution) -> float:
    """I(S;X) computed from the joint by direct double sum"""
    outer = np.outer(joint.p_s, joint.p_x)
    mask = joint.matrix > 0
    return float(np.sum(joint.matrix[mask] * np.log(joint.matrix[mask] / outer[mask])))


def column_stats(joint: JointDistribution, columns: ArrayLike) -> ColumnStats:
    """Posterior, lifts and the three semi-pointwise measures for each column"""
    cols = np.atleast_2d(np.asarray(columns, dtype=float))
    if cols.shape[-1] != joint.x_size:
        raise DimensionMismatch(f"Columns have {cols.shape[-1]} entries, alphabet has {joint.x_size}")

    posteriors = cols @ joint.channel.T
    lifts = posteriors / joint.p_s[None, :]
    log_lifts = np.log(np.where(posteriors > 0, lifts, 1.0))
    semi_mi = np.maximum(0.0, np.sum(posteriors * log_lifts, axis=1))
    diff = posteriors - joint.p_s[None, :]
    ell_one = np.sum(np.abs(diff), axis=1)
    chi_sq = np.sum(diff ** 2 / joint.p_s[None, :], axis=1)

    return ColumnStats(
        columns=cols,
        posteriors=posteriors,
        lifts=lifts,
        max_lift=lifts.max(axis=1),
        semi_mi=semi_mi,
        ell_one=ell_one,
        chi_sq=chi_sq,
    )


def posterior_stats(joint: JointDistribution, w: ArrayLike) -> PosteriorStats:
    """Leakage of the single column w"""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size != joint.x_size:
        raise DimensionMismatch(f"Column has shape {w.shape}, alphabet has {joint.x_size}")
    w = validate_prob_vector(w)
    stats = column_stats(joint, w)
    return PosteriorStats(
        posterior=stats.posteriors[0],
        lifts=stats.lifts[0],
        max_lift=float(stats.max_lift[0]),
        semi_mi=float(stats.semi_mi[0]),
        ell_one=float(stats.ell_one[0]),
        chi_sq=float(stats.chi_sq[0]),
    )


def to_candidates(stats: ColumnStats) -> list:
    """Unpack vectorized statistics into ColumnCandidate records"""
    return [
        ColumnCandidate(
            column=stats.columns[i],
            max_lift=float(stats.max_lift[i]),
            semi_mi=float(stats.semi_mi[i]),
            ell_one=float(stats.ell_one[i]),
            chi_sq=float(stats.chi_sq[i]),
        )
        for i in range(len(stats))
    ]


def _check_columns(joint: JointDistribution, mech: "Mechanism"):
    if mech.columns.shape[1] != joint.x_size:
        raise DimensionMismatch(
            f"Mechanism columns have {mech.columns.shape[1]} entries, alphabet has {joint.x_size}"
        )


def mechanism_leakage(joint: JointDistribution, mech: "Mechanism") -> LeakageReport:
    """Average leakages as P_Y-expectations of the semi-pointwise measures"""
    _check_columns(joint, mech)
    stats = column_stats(joint, mech.columns)
    return LeakageReport(
        mi_sy=float(mech.p_y @ stats.semi_mi),
        tv=float(0.5 * (mech.p_y @ stats.ell_one)),
        avg_chi_sq=float(mech.p_y @ stats.chi_sq),
        max_lift=float(stats.max_lift.max()),
        max_semi_mi=float(stats.semi_mi.max()),
        max_ell_one=float(stats.ell_one.max()),
        max_chi_sq=float(stats.chi_sq.max()),
    )


def mechanism_utility(joint: JointDistribution, mech: "Mechanism") -> UtilityReport:
    """I(X;Y) = H(X) - sum_y P_Y(y) h(W^y) and its normalization by H(X)"""
    _check_columns(joint, mech)
    deviation = float(np.max(np.abs(mech.p_y @ mech.columns - joint.p_x)))
    if deviation > settings.input_tolerance:
        raise MixtureMismatch(f"Mechanism mixes to P_X only within {deviation:.3e}")

    h_x = joint.entropy_x
    conditional = float(mech.p_y @ row_entropies(mech.columns))
    mi_xy = min(max(h_x - conditional, 0.0), h_x)
    return UtilityReport(mi_xy=mi_xy, normalized=mi_xy / h_x)
