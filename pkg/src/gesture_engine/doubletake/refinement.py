"""Second take: partial noising and masked denoising of a transition sandwich."""
import logging
from collections.abc import Sequence

import numpy as np

from gesture_engine.diffusion.process import q_sample
from gesture_engine.diffusion.sampler import Denoiser, cfg_denoise, reverse_process
from gesture_engine.diffusion.schedule import NoiseSchedule
from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_engine_parameter import HandshakeConfig

log = logging.getLogger("DblTake")


def anchor(first_take: np.ndarray, iterate: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Return ``first_take + weight (iterate - first_take)``, exact where the weight is 0 or 1."""
    weight = weight.reshape((-1,) + (1,) * (first_take.ndim - 1))
    mixed = first_take + weight * (iterate - first_take)
    return np.where(weight == 0.0, first_take, np.where(weight == 1.0, iterate, mixed))


def refine_sandwich(
    denoiser: Denoiser,
    sandwich: np.ndarray,
    masks: tuple[np.ndarray, np.ndarray],
    conditions: Sequence[tuple[ConditionBundle, float]],
    ownership: np.ndarray,
    config: HandshakeConfig,
    schedule: NoiseSchedule,
    rng: np.random.Generator,
) -> np.ndarray:
    """Refine a first-take sandwich.

    The sandwich is noised to step T' and denoised back to 0. After every step the iterate is pulled
    back towards the first take with the mask product, frames with weight 0 keep their first-take value.

    Parameters
    ----------
    denoiser
        Clean-sample predictor
    sandwich
        First-take sandwich M', shape (L, D)
    masks
        Hard and soft mask, each of length L
    conditions
        Condition bundle aligned to L frames and guidance weight per owning segment
    ownership
        Index into ``conditions`` for every sandwich frame
    config
        Handshake parameters, provides T'
    schedule
        Noise schedule
    rng
        Random generator

    Returns
    -------
        Refined sandwich M'', shape (L, D)
    """
    if config.refine_steps > schedule.num_steps:
        raise ValueError(f"Refinement steps {config.refine_steps} exceed the schedule length {schedule.num_steps}")
    hard, soft = masks
    if hard.shape != (sandwich.shape[0],) or soft.shape != hard.shape or ownership.shape != hard.shape:
        raise ValueError(f"Masks and ownership must cover the {sandwich.shape[0]} sandwich frames")
    weight = hard * soft
    owners = [int(k) for k in np.unique(ownership)]

    def _predict(x_t: np.ndarray, step: int) -> np.ndarray:
        prediction = np.empty_like(x_t)
        for k in owners:
            bundle, gamma = conditions[k]
            rows = ownership == k
            prediction[rows] = cfg_denoise(denoiser, x_t, step, bundle, gamma)[rows]
        return prediction

    def _project(x_t: np.ndarray, step: int) -> np.ndarray:
        return anchor(sandwich, x_t, weight)

    noisy = q_sample(sandwich, config.refine_steps, rng.standard_normal(sandwich.shape), schedule)
    log.debug("Refining %d frames from step %d", sandwich.shape[0], config.refine_steps)
    return reverse_process(_predict, anchor(sandwich, noisy, weight), config.refine_steps, schedule, rng, _project)
