"""Condition dropout for classifier-free guidance training."""
import numpy as np

from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle


def _check_probability(probability: float) -> None:
    if not 0.0 <= probability <= 1.0:
        raise ValueError(f"Mask probability must be in [0, 1], got {probability}")


def mask_conditions(bundle: ConditionBundle, rng: np.random.Generator, probability: float) -> ConditionBundle:
    """Replace the text embedding by the empty condition with the given probability.

    Audio is never masked, the returned bundle shares the audio array with the input.
    """
    _check_probability(probability)
    if rng.random() < probability:
        return bundle.audio_only()
    return bundle


def mask_text_batch(text: np.ndarray, rng: np.random.Generator, probability: float) -> tuple[np.ndarray, np.ndarray]:
    """Batched variant of :func:`mask_conditions` for a (B, text_dim) embedding matrix.

    Returns
    -------
        Masked embeddings and the boolean mask of dropped rows
    """
    _check_probability(probability)
    dropped = rng.random(text.shape[0]) < probability
    return np.where(dropped[:, None], 0.0, text), dropped
