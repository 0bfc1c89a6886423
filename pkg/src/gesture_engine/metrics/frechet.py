"""Frechet distance between Gaussian fits of feature distributions."""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

log = logging.getLogger("Metrics")

EIGENVALUE_TOLERANCE: float = 1e-8


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Square root of a symmetric positive semi-definite matrix, negative eigenvalues clamped to 0."""
    eigenvalues, eigenvectors = linalg.eigh(matrix)
    if eigenvalues.min() < -EIGENVALUE_TOLERANCE:
        log.warning("Clamped eigenvalue %.3e of a covariance product to 0", eigenvalues.min())
    return (eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ eigenvectors.T


@dataclass(frozen=True, eq=False)
class GaussianFit:
    """Mean and covariance of pooled feature vectors."""

    mean: np.ndarray
    """Mean vector, shape (D,)."""

    covariance: np.ndarray
    """Covariance matrix, shape (D, D)."""

    def __post_init__(self) -> None:
        """Validate shapes and symmetry."""
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        covariance = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if mean.ndim != 1 or covariance.shape != (mean.size, mean.size):
            raise ValueError(f"Covariance shape {covariance.shape} does not match mean shape {mean.shape}")
        if not np.allclose(covariance, covariance.T, atol=1e-10):
            raise ValueError("Covariance matrix must be symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", covariance)

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "GaussianFit":
        """Fit mean and PSD-regularized covariance to samples of shape (N, D)."""
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] < 2:
            raise ValueError(f"Gaussian fit requires a (N >= 2, D) sample matrix, got shape {samples.shape}")
        covariance = np.atleast_2d(np.cov(samples, rowvar=False))
        covariance = 0.5 * (covariance + covariance.T)
        eigenvalues, eigenvectors = linalg.eigh(covariance)
        covariance = (eigenvectors * np.clip(eigenvalues, 0.0, None)) @ eigenvectors.T
        return cls(samples.mean(axis=0), 0.5 * (covariance + covariance.T))

    @property
    def dim(self) -> int:
        """Feature dimension."""
        return int(self.mean.size)


def frechet_distance(fit_a: GaussianFit, fit_b: GaussianFit) -> float:
    """Frechet distance between two Gaussians.

    ``|mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_a S_b)^(1/2))``, the trace of the product root is taken from
    the symmetric matrix ``S_a^(1/2) S_b S_a^(1/2)`` which has the same eigenvalues.

    Raises
    ------
    ValueError
        Dimension mismatch
    """
    if fit_a.dim != fit_b.dim:
        raise ValueError(f"Gaussian fits differ in dimension: {fit_a.dim} and {fit_b.dim}")
    root_a = _psd_sqrt(fit_a.covariance)
    product = root_a @ fit_b.covariance @ root_a
    eigenvalues = linalg.eigvalsh(0.5 * (product + product.T))
    if eigenvalues.min() < -EIGENVALUE_TOLERANCE:
        log.warning("Clamped eigenvalue %.3e of a covariance product to 0", eigenvalues.min())
    trace_root = np.sqrt(np.clip(eigenvalues, 0.0, None)).sum()
    difference = fit_a.mean - fit_b.mean
    distance = difference @ difference + np.trace(fit_a.covariance) + np.trace(fit_b.covariance) - 2.0 * trace_root
    return float(max(distance, 0.0))
