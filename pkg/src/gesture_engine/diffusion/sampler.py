"""Reverse process with classifier-free guidance."""
import logging
from collections.abc import Callable
from typing import Protocol

import numpy as np

from gesture_engine.diffusion.process import posterior_step
from gesture_engine.diffusion.schedule import NoiseSchedule
from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_feature_layout import FeatureLayout, FeatureSequence

log = logging.getLogger("Diffusion")


class Denoiser(Protocol):
    """Interface of a denoiser predicting the clean sample."""

    feature_dim: int

    def __call__(self, x_t: np.ndarray, t: int, bundle: ConditionBundle) -> np.ndarray:
        """Return x0_hat for the iterate x_t (T_M, D) at step t under condition ``bundle``."""
        ...


def cfg_denoise(denoiser: Denoiser, x_t: np.ndarray, t: int, bundle: ConditionBundle, gamma: float) -> np.ndarray:
    """Classifier-free guidance mix of text-and-audio and audio-only predictions.

    Returns ``gamma D(x_t, t, [d, a]) + (1 - gamma) D(x_t, t, [empty, a])``. Without text both conditions
    coincide and the single prediction is returned, as for gamma 0 and 1.
    """
    if not bundle.has_text or gamma == 0.0:
        return denoiser(x_t, t, bundle.audio_only())
    if gamma == 1.0:
        return denoiser(x_t, t, bundle)
    conditioned = denoiser(x_t, t, bundle)
    audio_only = denoiser(x_t, t, bundle.audio_only())
    return gamma * conditioned + (1.0 - gamma) * audio_only


def reverse_process(
    predict: Callable[[np.ndarray, int], np.ndarray],
    x_start: np.ndarray,
    start_step: int,
    schedule: NoiseSchedule,
    rng: np.random.Generator,
    project: Callable[[np.ndarray, int], np.ndarray] | None = None,
) -> np.ndarray:
    """Run posterior steps from ``start_step`` down to 0.

    Parameters
    ----------
    predict
        Maps (x_t, t) to the clean-sample prediction
    x_start
        Iterate at ``start_step``
    start_step
        First step, 1 <= start_step <= T
    schedule
        Noise schedule
    rng
        Random generator for the posterior noise
    project, optional
        Applied to every new iterate x_{t-1} together with t - 1, by default None

    Returns
    -------
        Final iterate x_0
    """
    schedule.check_step(start_step)
    x_t = x_start
    for step in range(start_step, 0, -1):
        x0_hat = np.asarray(predict(x_t, step))
        if x0_hat.shape != x_t.shape:
            raise ValueError(f"Denoiser returned shape {x0_hat.shape}, expected {x_t.shape}")
        noise = rng.standard_normal(x_t.shape) if step > 1 else None
        x_t = posterior_step(x0_hat, x_t, step, schedule, noise)
        if project is not None:
            x_t = project(x_t, step - 1)
        if step % 100 == 0:
            log.debug("Reverse process at step %d", step)
    return x_t


def sample_loop(
    denoiser: Denoiser,
    bundle: ConditionBundle,
    gamma: float,
    num_frames: int,
    schedule: NoiseSchedule,
    rng: np.random.Generator,
) -> FeatureSequence:
    """Generate a feature sequence from pure noise.

    Parameters
    ----------
    denoiser
        Clean-sample predictor
    bundle
        Condition aligned to ``num_frames``
    gamma
        Guidance weight, 0 conditions on audio only, 1 on text and audio
    num_frames
        Sequence length T_M
    schedule
        Noise schedule
    rng
        Seeded generator, the result is deterministic given its state

    Returns
    -------
        Generated (normalized) feature sequence
    """
    if bundle.num_frames != num_frames:
        raise ValueError(f"Condition is aligned to {bundle.num_frames} frames, {num_frames} requested")
    x_start = rng.standard_normal((num_frames, denoiser.feature_dim))

    def _predict(x_t: np.ndarray, step: int) -> np.ndarray:
        return cfg_denoise(denoiser, x_t, step, bundle, gamma)

    x0 = reverse_process(_predict, x_start, schedule.num_steps, schedule, rng)
    return FeatureSequence(data=x0, layout=FeatureLayout.from_dim(denoiser.feature_dim))
