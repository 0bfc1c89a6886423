"""Interface classes for the kinematic feature representation."""
from dataclasses import dataclass

import numpy as np

NUM_FOOT_CONTACTS: int = 4


@dataclass(frozen=True)
class FeatureLayout:
    """Slice layout of one feature frame.

    The slices follow the HumanML3D ordering and are contiguous:

    ==========================  ============
    root rotational velocity    1
    root linear velocity (x,z)  2
    root height                 1
    root-relative positions     3 (J - 1)
    joint rotations (6D)        6 (J - 1)
    joint velocities            3 J
    foot contacts               4
    ==========================  ============

    which sums to ``12 J - 1``, i.e. 659 dimensions for the 55 joints of an SMPL-X skeleton.
    """

    joint_count: int
    """Number of skeleton joints J."""

    def __post_init__(self) -> None:
        """Validate joint count."""
        if self.joint_count < 2:
            raise ValueError(f"Feature layout requires J >= 2, got {self.joint_count}")

    @classmethod
    def from_dim(cls, dim: int) -> "FeatureLayout":
        """Infer the layout from a feature dimension D = 12 J - 1."""
        if (dim + 1) % 12 != 0:
            raise ValueError(f"Feature dimension {dim} is not of the form 12 J - 1")
        return cls(joint_count=(dim + 1) // 12)

    @property
    def dim(self) -> int:
        """Feature dimension D."""
        return 12 * self.joint_count - 1

    @property
    def widths(self) -> dict[str, int]:
        """Width of every slice in layout order."""
        num = self.joint_count
        return {
            "root_rot_velocity": 1,
            "root_linear_velocity": 2,
            "root_height": 1,
            "positions": 3 * (num - 1),
            "rotations": 6 * (num - 1),
            "velocities": 3 * num,
            "foot_contacts": NUM_FOOT_CONTACTS,
        }

    @property
    def slices(self) -> dict[str, slice]:
        """Contiguous slices partitioning [0, D)."""
        out: dict[str, slice] = {}
        start = 0
        for name, width in self.widths.items():
            out[name] = slice(start, start + width)
            start += width
        return out

    def __getitem__(self, name: str) -> slice:
        """Return the slice of a named feature group."""
        return self.slices[name]


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """Feature matrix of a motion sequence, shape (T_M, D).

    Holds encoded motion as well as model iterates (x_t, predicted x_0), so contact entries are
    only guaranteed to be binary for sequences produced by the encoder.
    """

    data: np.ndarray
    """Feature matrix with shape (T_M, D)."""

    layout: FeatureLayout
    """Layout describing the slices of the feature dimension."""

    def __post_init__(self) -> None:
        """Validate feature dimension and finiteness."""
        if self.data.ndim != 2 or self.data.shape[1] != self.layout.dim:
            raise ValueError(f"Feature data must have shape (T, {self.layout.dim}), got {self.data.shape}")
        if not np.isfinite(self.data).all():
            raise ValueError("Feature data contains non-finite values")

    @property
    def num_frames(self) -> int:
        """Number of frames."""
        return int(self.data.shape[0])

    def group(self, name: str) -> np.ndarray:
        """Return the columns of a named feature group."""
        return self.data[:, self.layout[name]]
