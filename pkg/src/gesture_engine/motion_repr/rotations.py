"""Conversion between the rotation forms used by the engine.

Quaternions are stored as (w, x, y, z) with a non-negative scalar part.
The 6D form is the first two columns of the rotation matrix, concatenated column by column.
"""
from enum import Enum

import numpy as np
from scipy.spatial.transform import Rotation

MATRIX_TOLERANCE: float = 1e-5
QUATERNION_TOLERANCE: float = 1e-5
DEGENERATE_6D_TOLERANCE: float = 1e-8


class RotationForm(str, Enum):
    """Enum for rotation representations."""

    MATRIX = "matrix"
    AXIS_ANGLE = "axis_angle"
    QUATERNION = "quaternion"
    SIX_D = "6d"


_TRAILING_SHAPE: dict[RotationForm, tuple[int, ...]] = {
    RotationForm.MATRIX: (3, 3),
    RotationForm.AXIS_ANGLE: (3,),
    RotationForm.QUATERNION: (4,),
    RotationForm.SIX_D: (6,),
}


def standardize_quaternion(quat: np.ndarray) -> np.ndarray:
    """Flip the sign of quaternions with negative scalar part, q and -q describe the same rotation."""
    quat = np.asarray(quat, dtype=float)
    return np.where(quat[..., :1] < 0, -quat, quat)


def quaternion_to_rotation(quat: np.ndarray) -> Rotation:
    """Create a flat scipy rotation stack from (w, x, y, z) quaternions of any batch shape."""
    flat = np.asarray(quat, dtype=float).reshape(-1, 4)
    return Rotation.from_quat(np.roll(flat, -1, axis=-1))


def rotation_to_quaternion(rotation: Rotation, batch_shape: tuple[int, ...] = ()) -> np.ndarray:
    """Return (w, x, y, z) quaternions with non-negative scalar part and the given batch shape."""
    quat = np.roll(np.asarray(rotation.as_quat()).reshape(-1, 4), 1, axis=-1)
    return standardize_quaternion(quat).reshape(*batch_shape, 4)


def quaternion_to_matrix(quat: np.ndarray) -> np.ndarray:
    """Convert (w, x, y, z) quaternions with shape (..., 4) to rotation matrices (..., 3, 3)."""
    quat = np.asarray(quat, dtype=float)
    return quaternion_to_rotation(quat).as_matrix().reshape(*quat.shape[:-1], 3, 3)


def matrix_to_quaternion(matrix: np.ndarray) -> np.ndarray:
    """Convert rotation matrices (..., 3, 3) to (w, x, y, z) quaternions (..., 4)."""
    matrix = np.asarray(matrix, dtype=float)
    return rotation_to_quaternion(Rotation.from_matrix(matrix.reshape(-1, 3, 3)), matrix.shape[:-2])


def matrix_to_sixd(matrix: np.ndarray) -> np.ndarray:
    """Return the 6D form (first column, second column) of rotation matrices (..., 3, 3)."""
    matrix = np.asarray(matrix, dtype=float)
    return np.concatenate([matrix[..., :, 0], matrix[..., :, 1]], axis=-1)


def sixd_to_matrix(sixd: np.ndarray) -> np.ndarray:
    """Re-orthonormalize 6D vectors (..., 6) into rotation matrices (..., 3, 3) by Gram-Schmidt.

    Raises
    ------
    ValueError
        Column vectors are (nearly) zero or parallel
    """
    sixd = np.asarray(sixd, dtype=float)
    col_a, col_b = sixd[..., :3], sixd[..., 3:6]
    norm_a = np.linalg.norm(col_a, axis=-1, keepdims=True)
    if np.any(norm_a < DEGENERATE_6D_TOLERANCE):
        raise ValueError("Degenerate 6D rotation: first column vector is zero")
    unit_a = col_a / norm_a
    ortho_b = col_b - np.sum(unit_a * col_b, axis=-1, keepdims=True) * unit_a
    norm_b = np.linalg.norm(ortho_b, axis=-1, keepdims=True)
    if np.any(norm_b < DEGENERATE_6D_TOLERANCE):
        raise ValueError("Degenerate 6D rotation: column vectors are parallel")
    unit_b = ortho_b / norm_b
    unit_c = np.cross(unit_a, unit_b)
    return np.stack([unit_a, unit_b, unit_c], axis=-1)


def yaw_matrix(angle: np.ndarray | float) -> np.ndarray:
    """Return rotation matrices about the vertical (Y) axis, shape (..., 3, 3)."""
    angle = np.asarray(angle, dtype=float)
    cos, sin = np.cos(angle), np.sin(angle)
    zero, one = np.zeros_like(angle), np.ones_like(angle)
    rows = [
        np.stack([cos, zero, sin], axis=-1),
        np.stack([zero, one, zero], axis=-1),
        np.stack([-sin, zero, cos], axis=-1),
    ]
    return np.stack(rows, axis=-2)


def _validate(value: np.ndarray, form: RotationForm) -> None:
    trailing = _TRAILING_SHAPE[form]
    if value.ndim < len(trailing) or value.shape[value.ndim - len(trailing):] != trailing:
        raise ValueError(f"Rotation in {form.value} form requires trailing shape {trailing}, got {value.shape}")
    if not np.isfinite(value).all():
        raise ValueError("Rotation contains non-finite values")
    if form == RotationForm.MATRIX:
        gram = np.swapaxes(value, -1, -2) @ value
        if np.abs(gram - np.eye(3)).max(initial=0.0) > MATRIX_TOLERANCE:
            raise ValueError(f"Rotation matrix is not orthonormal within {MATRIX_TOLERANCE}")
        if np.any(np.linalg.det(value) <= 0):
            raise ValueError("Rotation matrix has non-positive determinant")
    elif form == RotationForm.QUATERNION:
        error = np.abs(np.linalg.norm(value, axis=-1) - 1.0).max(initial=0.0)
        if error > QUATERNION_TOLERANCE:
            raise ValueError(f"Quaternion is not unit-norm within {QUATERNION_TOLERANCE} (error {error:.2e})")


def convert_rotation(value: np.ndarray, from_form: RotationForm | str, to_form: RotationForm | str) -> np.ndarray:
    """Convert rotations between matrix, axis-angle, quaternion and 6D form.

    Parameters
    ----------
    value
        Rotations with arbitrary leading batch dimensions and the trailing shape of ``from_form``:
        (3, 3) for matrices, (3,) for axis-angle, (4,) for (w, x, y, z) quaternions and (6,) for 6D
    from_form
        Representation of ``value``
    to_form
        Requested representation

    Returns
    -------
        Same rotations in ``to_form`` with unchanged batch dimensions

    Raises
    ------
    ValueError
        Input is not valid in ``from_form`` (non-orthonormal matrix, non-unit quaternion, degenerate 6D)
    """
    from_form, to_form = RotationForm(from_form), RotationForm(to_form)
    value = np.asarray(value, dtype=float)
    _validate(value, from_form)
    batch_shape = value.shape[: value.ndim - len(_TRAILING_SHAPE[from_form])]

    if from_form == RotationForm.SIX_D:
        matrix = sixd_to_matrix(value)
        if to_form == RotationForm.MATRIX:
            return matrix
        value, from_form = matrix, RotationForm.MATRIX
    if to_form == RotationForm.SIX_D:
        if from_form == RotationForm.MATRIX:
            return matrix_to_sixd(value)
        return matrix_to_sixd(convert_rotation(value, from_form, RotationForm.MATRIX))

    if from_form == RotationForm.MATRIX:
        rotation = Rotation.from_matrix(value.reshape(-1, 3, 3))
    elif from_form == RotationForm.AXIS_ANGLE:
        rotation = Rotation.from_rotvec(value.reshape(-1, 3))
    else:
        rotation = quaternion_to_rotation(value)

    if to_form == RotationForm.MATRIX:
        return rotation.as_matrix().reshape(*batch_shape, 3, 3)
    if to_form == RotationForm.AXIS_ANGLE:
        return rotation.as_rotvec().reshape(*batch_shape, 3)
    return rotation_to_quaternion(rotation, batch_shape)
