"""Forward kinematics over the joint hierarchy."""
import numpy as np

from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.interfaces.interface_skeleton import Skeleton
from gesture_engine.motion_repr.rotations import quaternion_to_matrix


def global_transforms(
    skeleton: Skeleton, root_translation: np.ndarray, local_matrices: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Compose local joint rotations down the tree.

    Parameters
    ----------
    skeleton
        Joint hierarchy in topological order
    root_translation
        Root positions, shape (T, 3)
    local_matrices
        Local joint rotation matrices, shape (T, J, 3, 3)

    Returns
    -------
        Global joint positions (T, J, 3) and global rotation matrices (T, J, 3, 3)
    """
    offsets = skeleton.offsets
    parents = skeleton.parents
    global_rot = np.empty_like(local_matrices)
    positions = np.empty((*local_matrices.shape[:2], 3))
    global_rot[:, 0] = local_matrices[:, 0]
    positions[:, 0] = root_translation
    for k in range(1, skeleton.num_joints):
        parent = parents[k]
        global_rot[:, k] = global_rot[:, parent] @ local_matrices[:, k]
        positions[:, k] = positions[:, parent] + global_rot[:, parent] @ offsets[k]
    return positions, global_rot


def forward_kinematics(skeleton: Skeleton, clip: MotionClip) -> np.ndarray:
    """Compute global joint positions of a clip.

    Parameters
    ----------
    skeleton
        Skeleton the clip refers to
    clip
        Motion clip

    Returns
    -------
        Global joint positions in meters, shape (T, J, 3)

    Raises
    ------
    ValueError
        Clip was recorded on a different skeleton
    """
    if clip.skeleton != skeleton:
        raise ValueError("Motion clip does not refer to the given skeleton")
    positions, _ = global_transforms(skeleton, clip.root_translation, quaternion_to_matrix(clip.joint_rotations))
    return positions


def rest_pose_positions(skeleton: Skeleton) -> np.ndarray:
    """Return joint positions of the rest pose with the root at the origin, shape (J, 3)."""
    identity = np.broadcast_to(np.eye(3), (1, skeleton.num_joints, 3, 3))
    positions, _ = global_transforms(skeleton, np.zeros((1, 3)), identity)
    return positions[0]


def rest_height(skeleton: Skeleton) -> float:
    """Vertical extent of the rest pose in meters."""
    heights = rest_pose_positions(skeleton)[:, 1]
    return float(heights.max() - heights.min())
