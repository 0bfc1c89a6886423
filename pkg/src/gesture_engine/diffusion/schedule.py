"""Noise schedules of the diffusion process."""
from dataclasses import dataclass

import numpy as np

CONSISTENCY_TOLERANCE: float = 1e-9


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    """Per-step and cumulative signal retention for steps t = 0 .. T.

    Index 0 is the clean sample, i.e. ``alpha[0] = alpha_bar[0] = 1``.
    """

    alpha: np.ndarray
    """Per-step retention alpha_t in (0, 1], shape (T + 1,)."""

    alpha_bar: np.ndarray
    """Cumulative retention prod_{s <= t} alpha_s, shape (T + 1,)."""

    def __post_init__(self) -> None:
        """Validate schedule."""
        if self.alpha.ndim != 1 or self.alpha.shape != self.alpha_bar.shape or self.alpha.size < 2:
            raise ValueError("Schedule requires matching alpha and alpha_bar vectors with T >= 1")
        if np.any(self.alpha <= 0) or np.any(self.alpha > 1):
            raise ValueError("Per-step alpha must lie in (0, 1]")
        if np.abs(self.alpha_bar[1:] - self.alpha_bar[:-1] * self.alpha[1:]).max() > CONSISTENCY_TOLERANCE:
            raise ValueError("alpha_bar is not the cumulative product of alpha")
        if abs(self.alpha_bar[0] - 1.0) > 1e-3:
            raise ValueError(f"alpha_bar[0] must be 1, got {self.alpha_bar[0]}")

    @classmethod
    def from_alpha_bar(cls, alpha_bar: np.ndarray | list[float]) -> "NoiseSchedule":
        """Construct a schedule from cumulative retention values starting with 1."""
        alpha_bar = np.asarray(alpha_bar, dtype=float)
        alpha = np.ones_like(alpha_bar)
        alpha[1:] = alpha_bar[1:] / alpha_bar[:-1]
        return cls(alpha=alpha, alpha_bar=alpha_bar)

    @property
    def num_steps(self) -> int:
        """Number of noising steps T."""
        return int(self.alpha.size - 1)

    @property
    def beta(self) -> np.ndarray:
        """Per-step noise variance beta_t = 1 - alpha_t."""
        return 1.0 - self.alpha

    @property
    def posterior_variance(self) -> np.ndarray:
        """Posterior variance (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) beta_t, zero at t = 0 and t = 1."""
        variance = np.zeros_like(self.alpha)
        denominator = 1.0 - self.alpha_bar[1:]
        numerator = (1.0 - self.alpha_bar[:-1]) * self.beta[1:]
        np.divide(numerator, denominator, out=variance[1:], where=denominator > 0)
        return variance

    def check_step(self, step: int) -> None:
        """Raise if ``step`` is not a valid step index."""
        if not 0 <= step <= self.num_steps:
            raise ValueError(f"Step {step} outside of [0, {self.num_steps}]")


def cosine_schedule(num_steps: int, offset: float = 0.008, alpha_floor: float = 0.001) -> NoiseSchedule:
    """Cosine schedule.

    Parameters
    ----------
    num_steps
        Number of noising steps T >= 1
    offset, optional
        Offset s keeping the first steps from being too small, by default 0.008
    alpha_floor, optional
        Lower clip of every per-step alpha, by default 0.001

    Returns
    -------
        Schedule with alpha_bar_t = f(t) / f(0), f(t) = cos^2(((t / T + s) / (1 + s)) pi / 2),
        recomputed as cumulative product after clipping the per-step alphas
    """
    if num_steps < 1:
        raise ValueError(f"Schedule requires at least one step, got {num_steps}")
    steps = np.arange(num_steps + 1, dtype=float)
    f = np.cos((steps / num_steps + offset) / (1 + offset) * np.pi / 2) ** 2
    ratio = f / f[0]
    alpha = np.ones(num_steps + 1)
    alpha[1:] = np.clip(ratio[1:] / ratio[:-1], alpha_floor, 1.0)
    return NoiseSchedule(alpha=alpha, alpha_bar=np.cumprod(alpha))
