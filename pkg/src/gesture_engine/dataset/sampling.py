"""Weighted sampling across datasets."""
from collections.abc import Iterator, Sequence

import numpy as np


def weighted_sampler(
    sizes: Sequence[int], weights: Sequence[float], rng: np.random.Generator
) -> Iterator[tuple[int, int]]:
    """Infinite stream of (dataset, element) index pairs.

    Every draw picks dataset k with probability w_k / sum(w) and then a uniform element of it.

    Raises
    ------
    ValueError
        Weights negative or all zero, length mismatch, or an empty dataset with positive weight
    """
    sizes = list(sizes)
    probabilities = np.asarray(weights, dtype=float)
    if probabilities.shape != (len(sizes),):
        raise ValueError(f"Got {probabilities.size} weights for {len(sizes)} datasets")
    if np.any(probabilities < 0) or not np.isfinite(probabilities).all():
        raise ValueError("Sampling weights must be finite and non-negative")
    if probabilities.sum() <= 0:
        raise ValueError("At least one sampling weight must be positive")
    if any(size < 1 and weight > 0 for size, weight in zip(sizes, probabilities)):
        raise ValueError("Dataset with positive sampling weight is empty")
    probabilities = probabilities / probabilities.sum()

    def _stream() -> Iterator[tuple[int, int]]:
        while True:
            dataset = int(rng.choice(len(sizes), p=probabilities))
            yield dataset, int(rng.integers(sizes[dataset]))

    return _stream()
