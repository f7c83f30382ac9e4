"""Closed-form divergences, information content, complexity, and interestingness.

All quantities are in bits (logs base 2). Information content of a pattern
is its point count times the summed per-attribute divergence between the
cluster statistics and the prior; the inner term does not depend on the
individual point, so the point sum collapses to a multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (
    AttributeStatistics,
    BiclusterPattern,
    BooleanStat,
    Hyperparameters,
    PriorModel,
    RealStat,
)

_LN2 = float(np.log(2.0))


def kl_bernoulli(p: float, q: float) -> float:
    """Divergence in bits of Bernoulli(p) from Bernoulli(q).

    Both frequencies must lie strictly inside (0, 1); upstream clamping
    guarantees this for fitted statistics.
    """
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise ValueError(f"frequencies must lie in (0, 1), got p={p}, q={q}")
    # clamp away the negative rounding dust the closed form leaves near p == q
    return float(max(0.0, p * np.log2(p / q) + (1.0 - p) * np.log2((1.0 - p) / (1.0 - q))))


def kl_gaussian(mean1: float, stdev1: float, mean0: float, stdev0: float) -> float:
    """Divergence in bits of N(mean1, stdev1^2) from N(mean0, stdev0^2)."""
    if not (stdev1 > 0.0 and stdev0 > 0.0):
        raise ValueError(f"standard deviations must be positive, got {stdev1}, {stdev0}")
    return float(
        max(
            0.0,
            (
                np.log(stdev0 / stdev1)
                + (stdev1 * stdev1 + (mean1 - mean0) ** 2) / (2.0 * stdev0 * stdev0)
                - 0.5
            )
            / _LN2,
        )
    )


def kl_bernoulli_vector(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Elementwise Bernoulli divergence in bits; inputs already clamped to (0, 1)."""
    return np.maximum(
        0.0, p * np.log2(p / q) + (1.0 - p) * np.log2((1.0 - p) / (1.0 - q))
    )


def kl_gaussian_vector(
    mean1: np.ndarray, stdev1: np.ndarray, mean0: np.ndarray, stdev0: np.ndarray
) -> np.ndarray:
    """Elementwise Gaussian divergence in bits; stdevs already floored above 0."""
    return np.maximum(
        0.0,
        (
            np.log(stdev0 / stdev1)
            + (stdev1 * stdev1 + (mean1 - mean0) ** 2) / (2.0 * stdev0 * stdev0)
            - 0.5
        )
        / _LN2,
    )


@dataclass(frozen=True)
class Score:
    """Information content, description complexity, and their ratio."""

    information: float
    complexity: float
    si: float

    @classmethod
    def from_parts(cls, information: float, complexity: float) -> "Score":
        si = information / complexity if complexity > 0.0 else 0.0
        return cls(information, complexity, si)


def attribute_divergence(stat: AttributeStatistics, prior_stat: AttributeStatistics) -> float:
    """Divergence in bits of one fitted attribute statistic from its prior."""
    if isinstance(stat, BooleanStat) and isinstance(prior_stat, BooleanStat):
        return kl_bernoulli(stat.frequency, prior_stat.frequency)
    if isinstance(stat, RealStat) and isinstance(prior_stat, RealStat):
        return kl_gaussian(stat.mean, stat.stdev, prior_stat.mean, prior_stat.stdev)
    raise ValueError("attribute statistic type does not match the prior")


def pattern_information(pattern: BiclusterPattern, prior: PriorModel) -> float:
    """Information content of one pattern in bits·points."""
    size = pattern.size
    contributions = np.array(
        [
            size * attribute_divergence(stat, prior.stats[j])
            for j, stat in zip(pattern.attributes, pattern.statistics)
        ],
        dtype=np.float64,
    )
    return float(np.sum(contributions))


def statistic_count(patterns: Sequence[BiclusterPattern]) -> int:
    """Total number of presented statistics: 1 per boolean, 2 per real attribute."""
    return sum(stat.n_statistics for p in patterns for stat in p.statistics)


def description_complexity(
    patterns: Sequence[BiclusterPattern], alpha: float, beta: float
) -> float:
    """Cost of processing the explanation: alpha plus the statistic count to the beta."""
    if not alpha >= 0.0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if not beta >= 1.0:
        raise ValueError(f"beta must be >= 1, got {beta}")
    return complexity_from_count(statistic_count(patterns), alpha, beta)


def complexity_from_count(total_statistics: int | float, alpha: float, beta: float) -> float:
    return float(alpha) + float(total_statistics) ** float(beta)


def subjective_interestingness(
    patterns: Sequence[BiclusterPattern], prior: PriorModel, hp: Hyperparameters
) -> Score:
    """Score a set of patterns that must partition all points of the dataset."""
    _check_partition(patterns, prior.n)
    information = sum(pattern_information(p, prior) for p in patterns)
    complexity = description_complexity(patterns, hp.alpha, hp.beta)
    return Score.from_parts(information, complexity)


def _check_partition(patterns: Sequence[BiclusterPattern], n: int) -> None:
    seen = np.zeros(n, dtype=bool)
    total = 0
    for p in patterns:
        idx = np.fromiter(p.points, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError("pattern points out of range")
        if seen[idx].any():
            raise ValueError("patterns overlap; not a partition")
        seen[idx] = True
        total += idx.size
    if total != n or not seen.all():
        raise ValueError(f"patterns cover {total} of {n} points; not a partition")
