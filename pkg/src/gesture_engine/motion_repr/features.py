"""Kinematic feature codec.

A clip is encoded frame by frame into root rotational velocity, root linear velocity in the heading frame,
root height, heading-frame joint positions, 6D joint rotations, heading-frame joint velocities and foot contacts.
Differences are taken between consecutive frames, the last frame repeats the preceding difference.
"""
import logging

import numpy as np
from scipy.spatial.transform import Rotation

from gesture_engine.interfaces.interface_engine_parameter import MotionConfig
from gesture_engine.interfaces.interface_feature_layout import FeatureLayout, FeatureSequence
from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.interfaces.interface_skeleton import Skeleton
from gesture_engine.motion_repr.canonicalize import root_yaw
from gesture_engine.motion_repr.kinematics import global_transforms
from gesture_engine.motion_repr.rotations import (
    matrix_to_quaternion,
    matrix_to_sixd,
    quaternion_to_matrix,
    sixd_to_matrix,
    yaw_matrix,
)

log = logging.getLogger("Features")

DEGENERATE_ALIGNMENT: float = 1e-8


def _forward_difference(values: np.ndarray) -> np.ndarray:
    """Difference to the next frame along axis 0, repeating the last difference."""
    diff = np.diff(values, axis=0)
    return np.concatenate([diff, diff[-1:]], axis=0)


def _wrap_angle(angle: np.ndarray) -> np.ndarray:
    return (angle + np.pi) % (2 * np.pi) - np.pi


def _to_heading_frame(yaw: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Rotate vectors (T, ..., 3) by the inverse heading of every frame."""
    inverse = yaw_matrix(-yaw)
    return np.einsum("tij,t...j->t...i", inverse, vectors)


def encode_features(skeleton: Skeleton, clip: MotionClip, config: MotionConfig | None = None) -> FeatureSequence:
    """Encode a canonical clip into the kinematic feature representation.

    Parameters
    ----------
    skeleton
        Skeleton of the clip
    clip
        Canonicalized clip at the configured frame rate with at least 2 frames
    config, optional
        Motion configuration with frame rate, foot joints and contact threshold, by default ``MotionConfig()``

    Returns
    -------
        Feature sequence with ``12 J - 1`` columns and one row per clip frame

    Raises
    ------
    ValueError
        Wrong frame rate, fewer than 2 frames, clip on a different skeleton
    KeyError
        Skeleton lacks one of the configured foot joints
    """
    config = config or MotionConfig()
    if clip.skeleton != skeleton:
        raise ValueError("Motion clip does not refer to the given skeleton")
    if not np.isclose(clip.fps, config.fps):
        raise ValueError(f"Clip frame rate {clip.fps} differs from the configured {config.fps} fps, resample first")
    if clip.num_frames < 2:
        raise ValueError(f"Encoding requires at least 2 frames, got {clip.num_frames}")
    foot_index = [skeleton.index(name) for name in config.foot_joints]

    local = quaternion_to_matrix(clip.joint_rotations)
    positions, global_rot = global_transforms(skeleton, clip.root_translation, local)
    root = clip.root_translation
    yaw = root_yaw(global_rot[:, 0])

    root_rot_velocity = _wrap_angle(_forward_difference(yaw))
    root_velocity = _to_heading_frame(yaw, _forward_difference(root))[:, [0, 2]]
    root_height = root[:, 1:2]

    ground = root * np.array([1.0, 0.0, 1.0])
    relative = _to_heading_frame(yaw, positions[:, 1:] - ground[:, None, :])
    sixd = matrix_to_sixd(local[:, 1:])
    displacement = _forward_difference(positions)
    velocities = _to_heading_frame(yaw, displacement)
    speed = np.linalg.norm(displacement[:, foot_index], axis=-1) * clip.fps
    contacts = (speed < config.contact_speed_threshold).astype(float)

    num_frames = clip.num_frames
    data = np.concatenate(
        [
            root_rot_velocity[:, None],
            root_velocity,
            root_height,
            relative.reshape(num_frames, -1),
            sixd.reshape(num_frames, -1),
            velocities.reshape(num_frames, -1),
            contacts,
        ],
        axis=-1,
    )
    log.debug("Encoded %d frames into %d features", num_frames, data.shape[1])
    return FeatureSequence(data=data, layout=FeatureLayout(skeleton.num_joints))


def _recover_tilt(reference: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Rotation that best maps root-relative rest-chain positions onto heading-frame positions."""
    if (
        np.linalg.svd(reference, compute_uv=False)[1:2].sum() < DEGENERATE_ALIGNMENT
        or np.linalg.svd(target, compute_uv=False)[1:2].sum() < DEGENERATE_ALIGNMENT
    ):
        return np.eye(3)
    rotation, _ = Rotation.align_vectors(target, reference)
    return rotation.as_matrix()


def decode_features(features: FeatureSequence, skeleton: Skeleton, fps: float = 20.0) -> MotionClip:
    """Decode a feature sequence into a motion clip.

    The root heading and ground position are integrated from the velocity features starting at the origin
    with zero heading. Joint rotations are read from the 6D slices, the root tilt is recovered from the
    heading-frame joint positions.

    Parameters
    ----------
    features
        Feature sequence for the joint count of ``skeleton``
    skeleton
        Skeleton of the decoded clip
    fps, optional
        Frame rate of the decoded clip, by default 20.0

    Returns
    -------
        Motion clip

    Raises
    ------
    ValueError
        Feature layout does not match the skeleton or values are non-finite
    """
    layout = features.layout
    if layout.joint_count != skeleton.num_joints:
        raise ValueError(f"Feature layout for {layout.joint_count} joints does not match skeleton "
                         f"with {skeleton.num_joints} joints")
    data = features.data
    if not np.isfinite(data).all():
        raise ValueError("Cannot decode non-finite features")
    num_frames, num_joints = data.shape[0], skeleton.num_joints

    yaw_velocity = data[:, layout["root_rot_velocity"]][:, 0]
    yaw = np.concatenate([[0.0], np.cumsum(yaw_velocity[:-1])])
    planar = data[:, layout["root_linear_velocity"]]
    step = np.zeros((num_frames, 3))
    step[:, 0], step[:, 2] = planar[:, 0], planar[:, 1]
    world_step = np.einsum("tij,tj->ti", yaw_matrix(yaw), step)
    root = np.zeros((num_frames, 3))
    root[1:] = np.cumsum(world_step[:-1], axis=0)
    root[:, 1] = data[:, layout["root_height"]][:, 0]

    local = np.empty((num_frames, num_joints, 3, 3))
    local[:, 0] = np.eye(3)
    local[:, 1:] = sixd_to_matrix(data[:, layout["rotations"]].reshape(num_frames, num_joints - 1, 6))

    chain, _ = global_transforms(skeleton, np.zeros((num_frames, 3)), local)
    relative = data[:, layout["positions"]].reshape(num_frames, num_joints - 1, 3) - root[:, None] * [0.0, 1.0, 0.0]
    heading = yaw_matrix(yaw)
    for frame in range(num_frames):
        local[frame, 0] = heading[frame] @ _recover_tilt(chain[frame, 1:], relative[frame])

    return MotionClip(skeleton, float(fps), root, matrix_to_quaternion(local))
