"""Test forward kinematics and canonicalization."""
import numpy as np
import pytest

from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.interfaces.interface_skeleton import Joint, Skeleton
from gesture_engine.motion_repr.canonicalize import (
    axis_map_matrix,
    canonicalize,
    resample_clip,
    root_yaw,
)
from gesture_engine.motion_repr.kinematics import forward_kinematics, rest_height, rest_pose_positions
from gesture_engine.motion_repr.rotations import matrix_to_quaternion, quaternion_to_matrix, yaw_matrix


def _identity_clip(skeleton: Skeleton, num_frames: int, translation: np.ndarray | None = None) -> MotionClip:
    rotations = np.zeros((num_frames, skeleton.num_joints, 4))
    rotations[..., 0] = 1.0
    if translation is None:
        translation = np.zeros((num_frames, 3))
    return MotionClip(skeleton, 20.0, translation, rotations)


def _rotate_clip(clip: MotionClip, angle: float, shift: np.ndarray) -> MotionClip:
    """Rotate a clip about the vertical axis and shift it on the ground plane."""
    turn = yaw_matrix(angle)
    local = quaternion_to_matrix(clip.joint_rotations)
    local[:, 0] = turn @ local[:, 0]
    return MotionClip(clip.skeleton, clip.fps, clip.root_translation @ turn.T + shift, matrix_to_quaternion(local))


def test_rest_pose(test_skeleton):
    """Test that identity rotations give the cumulative offsets."""
    positions = forward_kinematics(test_skeleton, _identity_clip(test_skeleton, 2))
    np.testing.assert_allclose(positions[0], rest_pose_positions(test_skeleton))
    np.testing.assert_allclose(positions[0, 2], [0.1, -0.9, 0.15])
    np.testing.assert_allclose(positions[0, 6], [0.0, 0.8, 0.05])
    assert rest_height(test_skeleton) == pytest.approx(1.7)


def test_root_rotation():
    """Test that a child offset follows the root yaw."""
    skeleton = Skeleton((Joint("root", None, (0.0, 0.0, 0.0)), Joint("child", 0, (1.0, 0.0, 0.0))))
    translation = np.array([[0.5, 1.0, -2.0]])
    rotations = np.stack([matrix_to_quaternion(yaw_matrix(np.pi / 2)), np.array([1.0, 0.0, 0.0, 0.0])])[None]
    positions = forward_kinematics(skeleton, MotionClip(skeleton, 20.0, translation, rotations))
    np.testing.assert_allclose(positions[0, 1], translation[0] + [0.0, 0.0, -1.0], atol=1e-12)


def test_rigid_equivariance(test_skeleton, random_clip):
    """Test that rotating and shifting the root moves all joints rigidly."""
    clip = random_clip(20)
    shift = np.array([1.0, 0.0, -3.0])
    moved = _rotate_clip(clip, 0.8, shift)
    expected = forward_kinematics(test_skeleton, clip) @ yaw_matrix(0.8).T + shift
    np.testing.assert_allclose(forward_kinematics(test_skeleton, moved), expected, atol=1e-9)


def test_foreign_skeleton(random_clip):
    """Test that a clip and a different skeleton are rejected."""
    skeleton = Skeleton((Joint("root", None, (0.0, 0.0, 0.0)), Joint("child", 0, (1.0, 0.0, 0.0))))
    with pytest.raises(ValueError):
        forward_kinematics(skeleton, random_clip(3))


def test_canonicalize_frame(test_skeleton, random_clip):
    """Test heading, ground-plane origin and floor contact of the first frame."""
    canonical = canonicalize(random_clip(40))
    positions = forward_kinematics(canonical.skeleton, canonical)

    assert rest_height(canonical.skeleton) == pytest.approx(1.7)
    assert root_yaw(quaternion_to_matrix(canonical.joint_rotations[0, 0])) == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose(canonical.root_translation[0, [0, 2]], 0.0, atol=1e-12)
    assert positions[0, :, 1].min() == pytest.approx(0.0, abs=1e-12)


def test_canonicalize_idempotent(random_clip):
    """Test that a canonical clip is unchanged by canonicalization."""
    once = canonicalize(random_clip(40))
    twice = canonicalize(once)
    np.testing.assert_allclose(twice.root_translation, once.root_translation, atol=1e-9)
    np.testing.assert_allclose(
        quaternion_to_matrix(twice.joint_rotations), quaternion_to_matrix(once.joint_rotations), atol=1e-9
    )


@pytest.mark.parametrize("angle", [0.5, -2.0, 3.0])
def test_canonicalize_yaw_invariant(test_skeleton, random_clip, angle):
    """Test that a clip rotated about the vertical axis has the same canonical form."""
    clip = random_clip(40)
    reference = canonicalize(clip)
    rotated = canonicalize(_rotate_clip(clip, angle, np.array([2.0, 0.3, 1.0])))
    np.testing.assert_allclose(
        forward_kinematics(rotated.skeleton, rotated), forward_kinematics(reference.skeleton, reference), atol=1e-5
    )


def test_canonicalize_scale():
    """Test scaling of a two meter skeleton to the target height."""
    skeleton = Skeleton((Joint("root", None, (0.0, 0.0, 0.0)), Joint("head", 0, (0.0, 2.0, 0.0))))
    translation = np.stack([np.zeros(5), np.zeros(5), np.arange(5.0)], axis=-1)
    canonical = canonicalize(_identity_clip(skeleton, 5, translation))

    assert canonical.skeleton.offsets[1, 1] == pytest.approx(1.7)
    np.testing.assert_allclose(canonical.root_translation[:, 2], 0.85 * np.arange(5.0), atol=1e-12)

    flat = Skeleton((Joint("root", None, (0.0, 0.0, 0.0)), Joint("side", 0, (1.0, 0.0, 0.0))))
    with pytest.raises(ValueError):
        canonicalize(_identity_clip(flat, 2))


def test_axis_map_matrix():
    """Test signed permutation matrices of axis maps."""
    np.testing.assert_allclose(axis_map_matrix(("x", "z", "-y")) @ [0.0, 0.0, 1.0], [0.0, 1.0, 0.0])
    np.testing.assert_allclose(axis_map_matrix(("x", "y", "z")), np.eye(3))
    for axis_map in [("x", "y", "-z"), ("x", "x", "z"), ("x", "w", "z"), ("x", "y")]:
        with pytest.raises(ValueError):
            axis_map_matrix(axis_map)


def test_resample(random_clip):
    """Test resampling to a lower frame rate."""
    clip = random_clip(61, fps=60.0)
    resampled = resample_clip(clip, 20.0)

    assert resampled.fps == 20.0
    assert resampled.num_frames == 21
    np.testing.assert_allclose(resampled.root_translation, clip.root_translation[::3], atol=1e-12)
    np.testing.assert_allclose(
        quaternion_to_matrix(resampled.joint_rotations), quaternion_to_matrix(clip.joint_rotations[::3]), atol=1e-9
    )
    with pytest.raises(ValueError):
        resample_clip(clip, 0.0)
