"""Interface class for a raw motion clip."""
from dataclasses import dataclass

import numpy as np

from gesture_engine.interfaces.interface_skeleton import Skeleton

UNIT_NORM_TOLERANCE: float = 1e-6


@dataclass(frozen=True, eq=False)
class MotionClip:
    """Per-frame root translation and local joint rotations at a fixed frame rate.

    Rotations are stored as unit quaternions in (w, x, y, z) order, which is the internal canonical form.
    Axis-angle, rotation matrices and the 6D form are only used for input and output.
    """

    skeleton: Skeleton
    """Skeleton the rotations refer to."""

    fps: float
    """Frames per second."""

    root_translation: np.ndarray
    """Root position per frame in meters, shape (T, 3)."""

    joint_rotations: np.ndarray
    """Local joint rotations as unit quaternions (w, x, y, z), shape (T, J, 4)."""

    def __post_init__(self) -> None:
        """Validate shapes, finiteness and quaternion norms."""
        num_frames = self.root_translation.shape[0] if self.root_translation.ndim == 2 else -1
        if num_frames < 1 or self.root_translation.shape != (num_frames, 3):
            raise ValueError(f"Root translation must have shape (T>=1, 3), got {self.root_translation.shape}")
        expected = (num_frames, self.skeleton.num_joints, 4)
        if self.joint_rotations.shape != expected:
            raise ValueError(f"Joint rotations must have shape {expected}, got {self.joint_rotations.shape}")
        if not (np.isfinite(self.root_translation).all() and np.isfinite(self.joint_rotations).all()):
            raise ValueError("Motion clip contains non-finite values")
        if not self.fps > 0:
            raise ValueError(f"Frame rate must be positive, got {self.fps}")
        norm_error = np.abs(np.linalg.norm(self.joint_rotations, axis=-1) - 1.0).max()
        if norm_error > UNIT_NORM_TOLERANCE:
            raise ValueError(f"Joint rotations are not unit quaternions (max norm error {norm_error:.2e})")

    @property
    def num_frames(self) -> int:
        """Number of frames T."""
        return int(self.root_translation.shape[0])

    @property
    def duration(self) -> float:
        """Clip duration in seconds."""
        return self.num_frames / self.fps
