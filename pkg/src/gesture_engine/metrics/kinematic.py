"""Jerk and acceleration statistics of joint trajectories."""
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.motion_repr.kinematics import forward_kinematics

ACCELERATION: int = 2
JERK: int = 3


@dataclass(frozen=True, eq=False)
class KinematicStats:
    """Mean and standard deviation across clips of the per-clip mean absolute derivative."""

    mean: float
    """Mean over clips, m/s^2 for acceleration and m/s^3 for jerk."""

    std: float
    """Population standard deviation over clips, 0 for a single clip."""

    per_clip: np.ndarray
    """Per-clip mean absolute derivative."""


def clip_derivative(clip: MotionClip, order: int) -> np.ndarray:
    """Return the order-th central difference of the global joint positions, shape (T - order, J, 3).

    Sample k is centered on frame k + order / 2 and uses frames k to k + order.
    """
    positions = forward_kinematics(clip.skeleton, clip)
    return np.diff(positions, n=order, axis=0) * clip.fps**order


def kinematic_stats(clips: Sequence[MotionClip], order: int, names: Sequence[str] | None = None) -> KinematicStats:
    """Aggregate acceleration (order 2) or jerk (order 3) over clips.

    Per clip, the absolute value of the central difference is averaged over frames, joints and axes.
    The clip means are then aggregated across clips.

    Parameters
    ----------
    clips
        Motion clips sharing one frame rate
    order
        Derivative order, 2 or 3
    names, optional
        Clip names used in error messages, by default the clip index

    Returns
    -------
        Kinematic statistics

    Raises
    ------
    ValueError
        No clips, unsupported order, mixed frame rates or a clip with fewer than order + 1 frames
    """
    if order not in (ACCELERATION, JERK):
        raise ValueError(f"Derivative order must be {ACCELERATION} or {JERK}, got {order}")
    if not clips:
        raise ValueError("Kinematic statistics require at least one clip")
    names = list(names) if names is not None else [f"clip {k}" for k in range(len(clips))]
    if len({clip.fps for clip in clips}) > 1:
        raise ValueError(f"Clips must share one frame rate, got {sorted({clip.fps for clip in clips})}")
    per_clip = []
    for name, clip in zip(names, clips):
        if clip.num_frames < order + 1:
            raise ValueError(f"{name} has {clip.num_frames} frames, order {order} requires at least {order + 1}")
        per_clip.append(np.abs(clip_derivative(clip, order)).mean())
    values = np.asarray(per_clip)
    return KinematicStats(mean=float(values.mean()), std=float(values.std()), per_clip=values)
