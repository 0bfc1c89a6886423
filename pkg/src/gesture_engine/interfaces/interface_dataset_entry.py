"""Interface class for a prepared dataset entry."""
from dataclasses import dataclass

import numpy as np

from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle


@dataclass(frozen=True, eq=False)
class DatasetEntry:
    """One training sequence with its condition."""

    features: np.ndarray
    """Feature matrix, shape (T, D)."""

    bundle: ConditionBundle
    """Condition; the missing modality is zero-filled."""

    source: str
    """Source tag, e.g. the dataset the sequence comes from."""

    original_length: int
    """Number of frames before padding or cropping."""

    name: str = ""
    """Identifier used in manifests."""

    def __post_init__(self) -> None:
        """Validate frame alignment between motion and audio."""
        if self.features.ndim != 2:
            raise ValueError(f"Features must be a (T, D) matrix, got {self.features.shape}")
        if self.bundle.num_frames != self.features.shape[0]:
            raise ValueError(
                f"Audio features ({self.bundle.num_frames} frames) are not aligned to motion "
                f"({self.features.shape[0]} frames)"
            )

    @property
    def num_frames(self) -> int:
        """Number of frames of the feature matrix."""
        return int(self.features.shape[0])

    @property
    def modality(self) -> str:
        """Modality tag: text, audio, both or none."""
        if self.bundle.has_text and self.bundle.has_audio:
            return "both"
        if self.bundle.has_text:
            return "text"
        if self.bundle.has_audio:
            return "audio"
        return "none"
