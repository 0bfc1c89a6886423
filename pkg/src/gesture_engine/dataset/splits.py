"""Length filtering and train/validation/test splits."""
import logging
from collections.abc import Sequence

import numpy as np

from gesture_engine.interfaces.interface_dataset_entry import DatasetEntry

log = logging.getLogger("Dataset")

SPLIT_NAMES: tuple[str, str, str] = ("train", "val", "test")


def filter_text_lengths(entries: Sequence[DatasetEntry], min_frames: int, max_frames: int) -> list[DatasetEntry]:
    """Drop text-conditioned entries outside of [min_frames, max_frames], other entries are kept."""
    kept = [
        entry for entry in entries
        if not entry.bundle.has_text or min_frames <= entry.original_length <= max_frames
    ]
    if len(kept) < len(entries):
        log.info("Length filter removed %d of %d entries", len(entries) - len(kept), len(entries))
    return kept


def assign_splits(names: Sequence[str], ratios: Sequence[int], rng: np.random.Generator) -> dict[str, str]:
    """Assign every sequence to train, val or test by a seeded shuffle.

    Split sizes are ``floor(n r_k / sum(r))`` for validation and test, the training split takes the rest.

    Returns
    -------
        Mapping of sequence name to split name
    """
    if len(set(names)) != len(names):
        raise ValueError("Sequence names must be unique")
    ratios = np.asarray(ratios, dtype=float)
    order = rng.permutation(len(names))
    num_val = int(len(names) * ratios[1] / ratios.sum())
    num_test = int(len(names) * ratios[2] / ratios.sum())
    assignment = {}
    for position, index in enumerate(order):
        if position < num_val:
            split = "val"
        elif position < num_val + num_test:
            split = "test"
        else:
            split = "train"
        assignment[names[index]] = split
    return assignment
