"""Core data model: typed datasets, fitted statistics, patterns, and solutions.

Everything here is immutable after construction and safe to share across
threads. Statistics fitting uses population (maximum likelihood) moments
with a relative variance floor and a half-count frequency clamp, so that
all downstream divergences are finite.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import ClassVar, Iterable, Sequence

import numpy as np

#: Absolute lower bound applied to every fitted variance.
VARIANCE_FLOOR = 1e-12


class AttributeType(Enum):
    """Kind of a dataset attribute; fixed once the data is ingested."""

    BOOLEAN = "boolean"
    REAL = "real"


class Linkage(Enum):
    """Inter-cluster distance rule used during agglomeration."""

    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"


@dataclass(frozen=True)
class Dataset:
    """An n-by-m data matrix plus a per-attribute (name, type) schema.

    Boolean attributes are stored as 0/1 columns. Missing values are not
    representable; ingestion rejects them before a Dataset is built.
    """

    values: np.ndarray
    schema: tuple[tuple[str, AttributeType], ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order="C")
        if values.ndim != 2:
            raise ValueError("dataset values must form a 2D matrix")
        n, m = values.shape
        if n < 2:
            raise ValueError(f"need at least 2 data points, got {n}")
        if m < 1:
            raise ValueError("need at least 1 attribute")
        schema = tuple((str(name), kind) for name, kind in self.schema)
        if len(schema) != m:
            raise ValueError(f"schema lists {len(schema)} attributes for {m} columns")
        if not np.isfinite(values).all():
            raise ValueError("dataset contains non-finite values")
        for j, (name, kind) in enumerate(schema):
            if kind is AttributeType.BOOLEAN:
                col = values[:, j]
                if not np.all((col == 0.0) | (col == 1.0)):
                    raise ValueError(f"boolean attribute {name!r} has values outside {{0, 1}}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "schema", schema)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @cached_property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.schema)

    @cached_property
    def attribute_types(self) -> tuple[AttributeType, ...]:
        return tuple(kind for _, kind in self.schema)

    @cached_property
    def boolean_mask(self) -> np.ndarray:
        mask = np.array([kind is AttributeType.BOOLEAN for _, kind in self.schema])
        mask.flags.writeable = False
        return mask


@dataclass(frozen=True)
class Embedding:
    """2D coordinates of the dataset's points, one row per point."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64, order="C")
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValueError("embedding must be an n-by-2 matrix")
        if not np.isfinite(coords).all():
            raise ValueError("embedding contains non-finite coordinates")
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class BooleanStat:
    """Fitted Bernoulli statistic: the frequency of value 1."""

    frequency: float

    n_statistics: ClassVar[int] = 1

    def __post_init__(self):
        if not 0.0 <= self.frequency <= 1.0:
            raise ValueError(f"frequency {self.frequency} outside [0, 1]")


@dataclass(frozen=True)
class RealStat:
    """Fitted Gaussian statistics: mean and standard deviation."""

    mean: float
    stdev: float

    n_statistics: ClassVar[int] = 2

    def __post_init__(self):
        if not self.stdev >= 0.0:
            raise ValueError(f"stdev {self.stdev} must be non-negative")


AttributeStatistics = BooleanStat | RealStat


@dataclass(frozen=True)
class PriorModel:
    """Per-attribute maximum likelihood statistics fitted on the full dataset.

    Carries the variance-floor and frequency-clamp policy so cluster-level
    fits apply exactly the same regularization.
    """

    stats: tuple[AttributeStatistics, ...]
    epsilon: float
    variance_floor: np.ndarray
    clamp: float
    n: int

    def __post_init__(self):
        floor = np.array(self.variance_floor, dtype=np.float64)
        floor.flags.writeable = False
        object.__setattr__(self, "variance_floor", floor)
        object.__setattr__(self, "stats", tuple(self.stats))

    @property
    def m(self) -> int:
        return len(self.stats)


@dataclass(frozen=True)
class Hyperparameters:
    """Tunable knobs for scoring and search."""

    alpha: float = 250.0
    beta: float = 1.6
    time_budget_ms: float = 5000.0
    linkage: Linkage = Linkage.SINGLE
    epsilon: float = 1e-4
    min_cluster_size: int = 1

    def __post_init__(self):
        if not self.alpha >= 0.0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.beta >= 1.0:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not self.time_budget_ms > 0.0:
            raise ValueError(f"time budget must be positive, got {self.time_budget_ms}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.min_cluster_size < 1:
            raise ValueError(f"min cluster size must be >= 1, got {self.min_cluster_size}")

    def with_updates(self, **changes) -> "Hyperparameters":
        return replace(self, **changes)


@dataclass(frozen=True)
class BiclusterPattern:
    """A cluster description: point subset, chosen attributes, fitted statistics.

    Attributes are ordered by decreasing per-attribute information so the
    most telling one comes first; statistics align 1:1 with attributes.
    """

    points: frozenset[int]
    attributes: tuple[int, ...]
    statistics: tuple[AttributeStatistics, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", frozenset(self.points))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "statistics", tuple(self.statistics))
        if not self.points:
            raise ValueError("pattern needs a nonempty point set")
        if not self.attributes:
            raise ValueError("pattern needs at least one attribute")
        if len(self.attributes) != len(self.statistics):
            raise ValueError("statistics must align 1:1 with attributes")

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ClusteringSolution:
    """A scored dendrogram cut: the cut-set, one pattern per cluster, scores.

    ``cutset`` holds dendrogram node ids in insertion order (root first);
    ``patterns`` is parallel to it. Pattern point sets partition the data.
    """

    cutset: tuple[int, ...]
    patterns: tuple[BiclusterPattern, ...]
    total_information: float
    complexity: float
    si: float
    iterations_completed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cutset", tuple(self.cutset))
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if len(self.cutset) != len(self.patterns):
            raise ValueError("one pattern per cut-set node required")

    @property
    def k(self) -> int:
        return len(self.patterns)

    @property
    def n_attributes(self) -> int:
        return sum(len(p.attributes) for p in self.patterns)

    def labels(self) -> np.ndarray:
        """Per-point cluster indices, following the cut-set insertion order."""
        n = sum(p.size for p in self.patterns)
        out = np.full(n, -1, dtype=np.int64)
        for idx, pattern in enumerate(self.patterns):
            out[list(pattern.points)] = idx
        return out


def fit_prior(dataset: Dataset, epsilon: float = 1e-4) -> PriorModel:
    """Fit the per-attribute background model on the full dataset.

    Real attributes get their sample mean and population variance, floored
    at ``epsilon`` times that attribute's full-data variance (never below
    ``VARIANCE_FLOOR``). Boolean attributes get their frequency clamped to
    [1/(2n), 1 - 1/(2n)], a half-count pseudo-observation.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    values = dataset.values
    n = dataset.n
    # per-column moments, computed exactly like the cluster path so that a
    # cluster equal to the full data reproduces the prior bit for bit
    global_var = np.array([np.var(values[:, j]) for j in range(dataset.m)])
    floor = np.maximum(epsilon * global_var, VARIANCE_FLOOR)
    clamp = 1.0 / (2.0 * n)
    stats: list[AttributeStatistics] = []
    for j, (_, kind) in enumerate(dataset.schema):
        if kind is AttributeType.BOOLEAN:
            freq = float(np.count_nonzero(values[:, j])) / n
            stats.append(BooleanStat(min(max(freq, clamp), 1.0 - clamp)))
        else:
            var = max(float(global_var[j]), float(floor[j]))
            stats.append(RealStat(float(np.mean(values[:, j])), float(np.sqrt(var))))
    return PriorModel(tuple(stats), float(epsilon), floor, clamp, n)


def fit_cluster_statistics(
    dataset: Dataset,
    prior: PriorModel,
    points: Iterable[int],
    attributes: Sequence[int],
) -> list[AttributeStatistics]:
    """Fit statistics for a point subset, restricted to the given attributes.

    Applies the prior's variance floor and the half-count clamp at the
    subset's own size, so a subset equal to the full data reproduces the
    prior exactly.
    """
    idx = np.fromiter(points, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("cannot fit statistics for an empty cluster")
    if idx.min() < 0 or idx.max() >= dataset.n:
        raise ValueError("point index out of range")
    sub = dataset.values[idx]
    count = idx.size
    clamp = 1.0 / (2.0 * count)
    out: list[AttributeStatistics] = []
    for j in attributes:
        if not 0 <= j < dataset.m:
            raise ValueError(f"attribute index {j} out of range")
        col = sub[:, j]
        if dataset.schema[j][1] is AttributeType.BOOLEAN:
            freq = float(np.count_nonzero(col)) / count
            out.append(BooleanStat(min(max(freq, clamp), 1.0 - clamp)))
        else:
            var = max(float(np.var(col)), float(prior.variance_floor[j]))
            out.append(RealStat(float(np.mean(col)), float(np.sqrt(var))))
    return out
