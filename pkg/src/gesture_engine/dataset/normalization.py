"""Per-dimension feature normalization."""
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from gesture_engine.interfaces.interface_dataset_entry import DatasetEntry


@dataclass(frozen=True, eq=False)
class NormStats:
    """Mean and floored standard deviation of every feature dimension over the training split."""

    mean: np.ndarray
    """Per-dimension mean, shape (D,)."""

    std: np.ndarray
    """Per-dimension standard deviation, floored, shape (D,)."""

    def __post_init__(self) -> None:
        """Validate statistics."""
        if self.mean.ndim != 1 or self.mean.shape != self.std.shape:
            raise ValueError("Normalization mean and std must be vectors of equal length")
        if not np.all(self.std > 0):
            raise ValueError("Normalization std must be positive")

    def apply(self, features: np.ndarray) -> np.ndarray:
        """Return (x - mean) / std."""
        return (features - self.mean) / self.std

    def invert(self, normalized: np.ndarray) -> np.ndarray:
        """Return z std + mean."""
        return normalized * self.std + self.mean


def fit_norm_stats(entries: Sequence[DatasetEntry | np.ndarray], std_floor: float = 1e-8) -> NormStats:
    """Fit normalization statistics over all frames of the given sequences.

    Parameters
    ----------
    entries
        Training sequences, dataset entries or (T, D) feature matrices
    std_floor, optional
        Lower bound of the standard deviation, by default 1e-8

    Returns
    -------
        Normalization statistics (population standard deviation)

    Raises
    ------
    ValueError
        Fewer than two sequences or inconsistent feature dimensions
    """
    if len(entries) < 2:
        raise ValueError(f"Normalization statistics require at least 2 sequences, got {len(entries)}")
    matrices = [entry.features if isinstance(entry, DatasetEntry) else np.asarray(entry) for entry in entries]
    if len({m.shape[1] for m in matrices}) != 1:
        raise ValueError("Sequences differ in feature dimension")
    pooled = np.concatenate(matrices, axis=0)
    return NormStats(mean=pooled.mean(axis=0), std=np.maximum(pooled.std(axis=0), std_floor))
