"""Fixed-length training windows."""
import numpy as np

from gesture_engine.interfaces.interface_dataset_entry import DatasetEntry


def crop_start(length: int, num_frames: int, rng: np.random.Generator) -> int:
    """Random start of a contiguous window, no random draw unless the sequence is longer than the window."""
    if length <= num_frames:
        return 0
    return int(rng.integers(0, length - num_frames + 1))


def _fit(values: np.ndarray, start: int, num_frames: int) -> np.ndarray:
    window = values[start: start + num_frames]
    if window.shape[0] == num_frames:
        return window.copy()
    out = np.zeros((num_frames, *values.shape[1:]), dtype=values.dtype)
    out[: window.shape[0]] = window
    return out


def pad_or_crop(features: np.ndarray, num_frames: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Bring a sequence to exactly ``num_frames`` frames.

    Shorter sequences are zero-padded at the end, longer ones are cropped to a random contiguous window.

    Returns
    -------
        Features (num_frames, D) and validity mask marking real frames (num_frames,)
    """
    length = features.shape[0]
    if length < 1:
        raise ValueError("Cannot pad an empty sequence")
    start = crop_start(length, num_frames, rng)
    valid = np.zeros(num_frames, dtype=bool)
    valid[: min(length, num_frames)] = True
    return _fit(features, start, num_frames), valid


def prepare_window(
    entry: DatasetEntry, num_frames: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pad or crop features and audio of an entry with the same window.

    Returns
    -------
        Features (num_frames, D), audio features (num_frames, A) and validity mask (num_frames,)
    """
    start = crop_start(entry.num_frames, num_frames, rng)
    valid = np.zeros(num_frames, dtype=bool)
    valid[: min(entry.num_frames, num_frames)] = True
    return (
        _fit(entry.features, start, num_frames),
        _fit(entry.bundle.audio_features, start, num_frames),
        valid,
    )
