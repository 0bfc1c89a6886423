"""Interface class for a skeleton (joint hierarchy with rest-pose offsets)."""
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True)
class Joint:
    """Single joint of a kinematic tree."""

    name: str
    """Joint name, unique within a skeleton."""

    parent: int | None
    """Index of the parent joint, None for the root."""

    offset: tuple[float, float, float]
    """Rest-pose offset from the parent joint in meters."""

    end_site: tuple[float, float, float] | None = None
    """Optional end-site offset of a leaf joint in meters (kept for BVH output)."""


def _triple(values: Any) -> tuple[float, float, float]:
    x, y, z = (float(v) for v in values)
    return (x, y, z)


@dataclass(frozen=True)
class Skeleton:
    """Joint hierarchy in topological order.

    The root is always the first joint and every parent index is smaller than the child index,
    which means a single forward pass over the joints composes transformations down the tree.
    """

    joints: tuple[Joint, ...]
    """Ordered joints, root first."""

    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate the hierarchy."""
        if len(self.joints) < 2:
            raise ValueError(f"Skeleton requires at least 2 joints, got {len(self.joints)}")
        roots = [k for k, joint in enumerate(self.joints) if joint.parent is None]
        if roots != [0]:
            raise ValueError(f"Skeleton requires exactly one root at index 0, found roots at {roots}")
        for k, joint in enumerate(self.joints[1:], start=1):
            if joint.parent is None or not 0 <= joint.parent < k:
                raise ValueError(f"Joint {joint.name} ({k}) has parent {joint.parent}, topological order violated")
        if not np.isfinite(self.offsets).all():
            raise ValueError("Skeleton offsets must be finite")
        names = [joint.name for joint in self.joints]
        if len(set(names)) != len(names):
            raise ValueError("Joint names must be unique")
        object.__setattr__(self, "_index", {name: k for k, name in enumerate(names)})

    @property
    def num_joints(self) -> int:
        """Number of joints J."""
        return len(self.joints)

    @property
    def names(self) -> list[str]:
        """Joint names in order."""
        return [joint.name for joint in self.joints]

    @property
    def parents(self) -> np.ndarray:
        """Parent indices, -1 for the root."""
        return np.array([-1 if j.parent is None else j.parent for j in self.joints], dtype=int)

    @property
    def offsets(self) -> np.ndarray:
        """Rest-pose offsets, shape (J, 3)."""
        return np.array([j.offset for j in self.joints], dtype=float)

    def index(self, name: str) -> int:
        """Return the index of a joint by name.

        Raises
        ------
        KeyError
            Unknown joint name
        """
        try:
            return self._index[name]
        except KeyError as exc:
            raise KeyError(f"Skeleton has no joint named {name!r}") from exc

    def children(self, index: int) -> list[int]:
        """Return the indices of the direct children of a joint."""
        return [k for k, joint in enumerate(self.joints) if joint.parent == index]

    def scaled(self, factor: float) -> "Skeleton":
        """Return a copy with all offsets (and end sites) multiplied by ``factor``."""
        return self.transformed(np.eye(3) * factor)

    def transformed(self, matrix: np.ndarray) -> "Skeleton":
        """Return a copy with offsets mapped by a 3x3 matrix (axis remapping)."""

        def _map(vec: tuple[float, float, float]) -> tuple[float, float, float]:
            mapped = matrix @ np.asarray(vec, dtype=float)
            return (float(mapped[0]), float(mapped[1]), float(mapped[2]))

        return Skeleton(
            tuple(
                Joint(j.name, j.parent, _map(j.offset), None if j.end_site is None else _map(j.end_site))
                for j in self.joints
            )
        )

    # Defined before dict(), afterwards the name refers to the method within the class body
    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Skeleton":
        """Construct a skeleton from the output of :meth:`dict`."""
        return cls(
            tuple(
                Joint(
                    name=str(j["name"]),
                    parent=None if j["parent"] is None else int(j["parent"]),
                    offset=_triple(j["offset"]),
                    end_site=None if j.get("end_site") is None else _triple(j["end_site"]),
                )
                for j in data["joints"]
            )
        )

    def dict(self) -> dict[str, Any]:
        """Return a JSON serializable description."""
        return {
            "joints": [
                {"name": j.name, "parent": j.parent, "offset": list(j.offset),
                 "end_site": None if j.end_site is None else list(j.end_site)}
                for j in self.joints
            ]
        }
