"""Transition masks of a handshake sandwich.

A sandwich is laid out as ``(context of the earlier clip, handshake, context of the later clip)``.
The hard mask marks the frames the second take may change, the handshake and ``b`` frames on
either side. The soft mask holds ``hard_max`` on the handshake and decays linearly to ``soft_min``
over the ``b`` frames entering the fixed context. Their product is the refinement weight::

    h = 4, b = 2, three context frames

    frame   0     1     2     3     4     5     6     7     8     9
    hard    0     1     1     1     1     1     1     1     1     0
    soft    0.15  0.15  0.5   0.85  0.85  0.85  0.85  0.5   0.15  0.15
    weight  0     0.15  0.5   0.85  0.85  0.85  0.85  0.5   0.15  0
"""
from dataclasses import dataclass

import numpy as np

from gesture_engine.interfaces.interface_engine_parameter import HandshakeConfig


@dataclass(frozen=True)
class TransitionWindow:
    """Placement of a sandwich in the unfolded sequence."""

    start: int
    """First frame of the sandwich."""

    handshake_start: int
    """First handshake frame."""

    handshake_stop: int
    """Frame after the handshake."""

    stop: int
    """Frame after the sandwich."""

    @property
    def context(self) -> tuple[int, int]:
        """Number of context frames before and after the handshake."""
        return self.handshake_start - self.start, self.stop - self.handshake_stop

    @property
    def length(self) -> int:
        """Sandwich length."""
        return self.stop - self.start


def transition_window(handshake_start: int, total_frames: int, config: HandshakeConfig) -> TransitionWindow:
    """Place the sandwich of a handshake, clipping the context to the sequence bounds."""
    stop = handshake_start + config.handshake_size
    if handshake_start < 0 or stop > total_frames:
        raise ValueError(f"Handshake [{handshake_start}, {stop}) exceeds the sequence of {total_frames} frames")
    return TransitionWindow(
        start=max(handshake_start - config.context_frames, 0),
        handshake_start=handshake_start,
        handshake_stop=stop,
        stop=min(stop + config.context_frames, total_frames),
    )


def build_transition_masks(context: tuple[int, int], config: HandshakeConfig) -> tuple[np.ndarray, np.ndarray]:
    """Build the per-frame hard and soft masks of a sandwich.

    Parameters
    ----------
    context
        Number of frames before and after the handshake
    config
        Handshake size, blend length and mask extrema

    Returns
    -------
        Hard and soft mask, each of length ``context[0] + h + context[1]``

    Raises
    ------
    ValueError
        Blend length exceeds the context on either side
    """
    before, after = context
    b = config.blend_length
    if before < b or after < b:
        raise ValueError(f"Blend length {b} exceeds the available context of {before} and {after} frames")
    h = config.handshake_size
    frames = np.arange(before + h + after)
    # Distance to the handshake, 0 inside
    distance = np.maximum(before - frames, 0) + np.maximum(frames - (before + h - 1), 0)
    hard = (distance <= b).astype(float)
    ramp = config.hard_max + (config.soft_min - config.hard_max) * np.minimum(distance, b) / b
    soft = np.where(distance <= b, ramp, config.soft_min)
    return hard, soft
