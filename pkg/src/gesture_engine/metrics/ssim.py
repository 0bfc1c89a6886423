"""Structural similarity of motion matrices."""
import numpy as np
from scipy import ndimage

SIGMA: float = 1.5
TRUNCATE: float = 3.5  # 11 x 11 window
K1: float = 0.01
K2: float = 0.03
BORDER: int = 5


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Structural similarity of two (T, D) motion matrices treated as single-channel images.

    Local statistics use a Gaussian window (sigma 1.5, 11 x 11), the dynamic range is the observed
    range over both inputs. Window positions within 5 frames of a border are excluded along every axis
    longer than the window.

    Raises
    ------
    ValueError
        Shape mismatch, non-matrix input or zero dynamic range
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"SSIM requires two matrices of equal shape, got {a.shape} and {b.shape}")
    data_range = max(a.max(), b.max()) - min(a.min(), b.min())
    if data_range <= 0:
        raise ValueError("SSIM requires a nonzero dynamic range")
    c1 = (K1 * data_range) ** 2
    c2 = (K2 * data_range) ** 2

    def _filter(x: np.ndarray) -> np.ndarray:
        return ndimage.gaussian_filter(x, sigma=SIGMA, truncate=TRUNCATE, mode="reflect")

    mu_a, mu_b = _filter(a), _filter(b)
    var_a = _filter(a * a) - mu_a * mu_a
    var_b = _filter(b * b) - mu_b * mu_b
    cov = _filter(a * b) - mu_a * mu_b
    index_map = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2))
    crop = tuple(slice(BORDER, -BORDER) if size > 2 * BORDER else slice(None) for size in index_map.shape)
    return float(index_map[crop].mean())
