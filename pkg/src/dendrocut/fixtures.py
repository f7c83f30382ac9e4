"""Synthetic planted-cluster data for demos, benchmarks, and tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AttributeType, Dataset, Embedding


@dataclass(frozen=True)
class PlantedData:
    """Blobs with known labels and known discriminating attributes."""

    dataset: Dataset
    embedding: Embedding
    labels: np.ndarray
    discriminating: tuple[int, ...]


def make_planted_blobs(
    n: int = 300,
    n_clusters: int = 3,
    n_discriminating: int = 3,
    n_noise: int = 7,
    separation: float = 5.0,
    spread: float = 20.0,
    seed: int = 7,
) -> PlantedData:
    """Gaussian blobs in 2D whose identity is carried by a few attributes.

    The embedding coordinates are the blob positions themselves (unit noise
    around centers ``spread`` apart). Discriminating attributes shift their
    mean by ``separation`` standard deviations per cluster; noise attributes
    are standard normal everywhere.
    """
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % n_clusters)
    angles = 2.0 * np.pi * np.arange(n_clusters) / n_clusters
    centers = spread * np.column_stack([np.cos(angles), np.sin(angles)])
    coords = centers[labels] + rng.standard_normal((n, 2))

    m = n_discriminating + n_noise
    values = rng.standard_normal((n, m))
    for j in range(n_discriminating):
        values[:, j] += separation * labels
    schema = tuple((f"attr{j}", AttributeType.REAL) for j in range(m))
    return PlantedData(
        Dataset(values, schema),
        Embedding(coords),
        labels,
        tuple(range(n_discriminating)),
    )


def make_acceptance_blobs(seed: int = 7, separation: float = 5.0) -> PlantedData:
    """Desk-scale fixture: three unequal blobs, three telling attributes, noise.

    The first two attributes shift by ``separation`` standard deviations for
    the first blob, the third one for the small last blob. The small blob
    makes the third split informative but not cheap, so the clustering only
    grows beyond two clusters once the complexity offset affords it.
    """
    rng = np.random.default_rng(seed)
    sizes = (150, 140, 10)
    n = sum(sizes)
    labels = rng.permutation(np.repeat(np.arange(3), sizes))
    angles = 2.0 * np.pi * np.arange(3) / 3
    centers = 20.0 * np.column_stack([np.cos(angles), np.sin(angles)])
    coords = centers[labels] + rng.standard_normal((n, 2))

    values = rng.standard_normal((n, 10))
    values[:, 0] += separation * (labels == 0)
    values[:, 1] += separation * (labels == 0)
    values[:, 2] += separation * (labels == 2)
    schema = tuple((f"attr{j}", AttributeType.REAL) for j in range(10))
    return PlantedData(Dataset(values, schema), Embedding(coords), labels, (0, 1, 2))
