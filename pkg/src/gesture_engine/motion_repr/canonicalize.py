"""Bring clips from different sources into one convention.

The engine convention is right-handed with Y up and +Z forward. A canonical clip is scaled to a common
rest-pose height, starts at the ground-plane origin, faces +Z in its first frame and stands on the ground.
"""
import logging

import numpy as np
from scipy.spatial.transform import Slerp

from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.motion_repr.kinematics import forward_kinematics, rest_height
from gesture_engine.motion_repr.rotations import (
    matrix_to_quaternion,
    quaternion_to_matrix,
    quaternion_to_rotation,
    rotation_to_quaternion,
    yaw_matrix,
)

log = logging.getLogger("MotionRepr")

_AXES = {"x": 0, "y": 1, "z": 2}


def axis_map_matrix(axis_map: tuple[str, ...] | list[str]) -> np.ndarray:
    """Return the signed permutation matrix of an axis map.

    Entry ``i`` of the axis map names the (optionally negated) source axis of engine axis ``i``,
    e.g. ``("x", "z", "-y")`` converts Z-up data to Y-up.

    Raises
    ------
    ValueError
        Axis map is not a signed permutation or mirrors the coordinate system
    """
    if len(axis_map) != 3:
        raise ValueError(f"Axis map requires three entries, got {axis_map}")
    matrix = np.zeros((3, 3))
    for row, entry in enumerate(axis_map):
        key = entry.strip().lower()
        sign = -1.0 if key.startswith("-") else 1.0
        key = key.lstrip("+-")
        if key not in _AXES:
            raise ValueError(f"Unknown axis {entry!r} in axis map")
        matrix[row, _AXES[key]] = sign
    if not np.allclose(np.abs(matrix).sum(axis=0), 1.0):
        raise ValueError(f"Axis map {tuple(axis_map)} is not a permutation")
    if np.linalg.det(matrix) < 0:
        raise ValueError(f"Axis map {tuple(axis_map)} mirrors the coordinate system (left-handed result)")
    return matrix


def remap_axes(clip: MotionClip, axis_map: tuple[str, ...] | list[str]) -> MotionClip:
    """Express a clip in the engine coordinate system.

    Offsets and translations are mapped by the permutation P, rotations are conjugated (P R P^T).
    """
    matrix = axis_map_matrix(axis_map)
    if np.array_equal(matrix, np.eye(3)):
        return clip
    rotations = matrix @ quaternion_to_matrix(clip.joint_rotations) @ matrix.T
    return MotionClip(
        skeleton=clip.skeleton.transformed(matrix),
        fps=clip.fps,
        root_translation=clip.root_translation @ matrix.T,
        joint_rotations=matrix_to_quaternion(rotations),
    )


def root_yaw(root_rotations: np.ndarray) -> np.ndarray:
    """Heading angle about Y of root rotation matrices (..., 3, 3).

    The heading is the angle of the rotated forward axis (+Z) projected onto the ground plane.
    """
    forward = root_rotations[..., :, 2]
    return np.arctan2(forward[..., 0], forward[..., 2])


def canonicalize(clip: MotionClip, target_height: float = 1.70) -> MotionClip:
    """Scale, rotate and shift a clip into the canonical frame.

    Parameters
    ----------
    clip
        Motion clip in engine axes
    target_height
        Rest-pose skeleton height after scaling in meters, by default 1.70

    Returns
    -------
        Clip whose skeleton has rest height ``target_height``, which faces +Z in the first frame,
        whose first-frame root lies above the origin and whose lowest first-frame joint touches y = 0

    Raises
    ------
    ValueError
        Skeleton has zero height
    """
    height = rest_height(clip.skeleton)
    if height <= 0:
        raise ValueError("Cannot canonicalize clip, skeleton rest height is zero")
    scale = target_height / height
    skeleton = clip.skeleton.scaled(scale)

    local = quaternion_to_matrix(clip.joint_rotations)
    turn = yaw_matrix(-root_yaw(local[0, 0]))
    local[:, 0] = turn @ local[:, 0]
    translation = (clip.root_translation * scale) @ turn.T

    rotated = MotionClip(skeleton, clip.fps, translation, matrix_to_quaternion(local))
    first = forward_kinematics(skeleton, rotated)[0]
    shift = np.array([translation[0, 0], first[:, 1].min(), translation[0, 2]])
    log.debug("Canonicalized clip: scale %.4f, shift %s", scale, np.round(shift, 4))
    return MotionClip(skeleton, clip.fps, translation - shift, rotated.joint_rotations)


def resample_clip(clip: MotionClip, fps: float) -> MotionClip:
    """Resample a clip to a new frame rate.

    Rotations are interpolated by spherical linear interpolation, root translation linearly.
    The resampled clip covers the original duration, the last original frame is kept when it falls
    on the new frame grid.
    """
    if fps <= 0:
        raise ValueError(f"Frame rate must be positive, got {fps}")
    if np.isclose(fps, clip.fps) or clip.num_frames == 1:
        return MotionClip(clip.skeleton, float(fps), clip.root_translation, clip.joint_rotations)

    src_times = np.arange(clip.num_frames) / clip.fps
    num_frames = int(np.floor(src_times[-1] * fps + 1e-9)) + 1
    times = np.arange(num_frames) / fps
    log.info("Resampling clip from %.2f to %.2f fps (%d -> %d frames)", clip.fps, fps, clip.num_frames, num_frames)

    translation = np.stack([np.interp(times, src_times, clip.root_translation[:, k]) for k in range(3)], axis=-1)
    rotations = np.empty((num_frames, clip.skeleton.num_joints, 4))
    for joint in range(clip.skeleton.num_joints):
        slerp = Slerp(src_times, quaternion_to_rotation(clip.joint_rotations[:, joint]))
        rotations[:, joint] = rotation_to_quaternion(slerp(times), (num_frames,))
    return MotionClip(clip.skeleton, float(fps), translation, rotations)
