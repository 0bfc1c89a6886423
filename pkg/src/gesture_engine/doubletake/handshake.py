"""Handshake blending and unfolding of consecutive clips."""
from collections.abc import Sequence

import numpy as np


def blend_handshake(prev_tail: np.ndarray, next_head: np.ndarray, handshake_size: int) -> np.ndarray:
    """Blend the tail of a clip into the head of the next one.

    Frame ``j`` of the handshake is ``(1 - j / h) prev_tail[j] + (j / h) next_head[j]``, so the handshake
    starts on the earlier clip and moves towards the later one.

    Parameters
    ----------
    prev_tail
        Last h frames of the earlier clip, shape (h, D)
    next_head
        First h frames of the later clip, shape (h, D)
    handshake_size
        Handshake length h

    Returns
    -------
        Handshake tau, shape (h, D)
    """
    if handshake_size < 1:
        raise ValueError(f"Handshake size must be positive, got {handshake_size}")
    if prev_tail.shape != next_head.shape or prev_tail.shape[0] != handshake_size:
        raise ValueError(
            f"Handshake inputs must both have {handshake_size} frames, got {prev_tail.shape} and {next_head.shape}"
        )
    alpha = (np.arange(handshake_size) / handshake_size).reshape((-1,) + (1,) * (prev_tail.ndim - 1))
    return (1.0 - alpha) * prev_tail + alpha * next_head


def handshake_starts(lengths: Sequence[int], handshake_size: int) -> list[int]:
    """Return the first output frame of every handshake of an unfolded sequence."""
    ends = np.cumsum(lengths)[:-1]
    return [int(end - (k + 1) * handshake_size) for k, end in enumerate(ends)]


def segment_offsets(lengths: Sequence[int], handshake_size: int) -> list[int]:
    """Return the output frame at which every clip's first frame lands after unfolding."""
    return [0] + handshake_starts(lengths, handshake_size)


def unfold(clips: Sequence[np.ndarray], handshakes: Sequence[np.ndarray], handshake_size: int) -> np.ndarray:
    """Concatenate clips, replacing each overlapping tail and head pair by its handshake.

    Parameters
    ----------
    clips
        n clips of shape (l_i, D)
    handshakes
        n - 1 handshakes of shape (h, D)
    handshake_size
        Handshake length h

    Returns
    -------
        Sequence of ``sum(l_i) - (n - 1) h`` frames
    """
    if len(handshakes) != len(clips) - 1:
        raise ValueError(f"{len(clips)} clips require {len(clips) - 1} handshakes, got {len(handshakes)}")
    h = handshake_size
    parts = []
    for k, clip in enumerate(clips):
        start = h if k > 0 else 0
        stop = clip.shape[0] - h if k < len(clips) - 1 else clip.shape[0]
        if stop < start:
            raise ValueError(f"Clip {k} with {clip.shape[0]} frames is shorter than two handshakes of {h} frames")
        parts.append(clip[start:stop])
        if k < len(handshakes):
            if handshakes[k].shape[0] != h:
                raise ValueError(f"Handshake {k} has {handshakes[k].shape[0]} frames, expected {h}")
            parts.append(handshakes[k])
    return np.concatenate(parts, axis=0)


def boundary_discontinuity(features: np.ndarray, spans: Sequence[tuple[int, int]], margin: int) -> float:
    """Largest L2 jump between consecutive frames around the handshakes.

    Parameters
    ----------
    features
        Feature matrix (N, D)
    spans
        Handshake frame ranges [start, stop)
    margin
        Frames considered on either side of every span

    Returns
    -------
        Maximum inter-frame jump, 0 without handshakes
    """
    jumps = [0.0]
    for start, stop in spans:
        region = features[max(start - margin, 0): min(stop + margin, features.shape[0])]
        if region.shape[0] > 1:
            jumps.append(float(np.linalg.norm(np.diff(region, axis=0), axis=1).max()))
    return max(jumps)
