"""Interface classes for the denoiser condition c = [d, a]."""
from dataclasses import dataclass, replace

import numpy as np

TEXT_EMBEDDING_DIM: int = 512


@dataclass(frozen=True)
class AudioFeatureLayout:
    """Named column widths of the frame-level audio feature matrix.

    Only the total (1133) is fixed by the model input, the split between the features is a declared default.
    """

    mfcc: int = 40
    """Number of mel-frequency cepstral coefficients."""

    mel_spectrum: int = 85
    """Number of log-mel bands."""

    pitch: int = 2
    """Fundamental frequency in Hz and voicing flag."""

    energy: int = 1
    """Log frame RMS."""

    onsets: int = 1
    """Half-wave rectified spectral flux."""

    external_embedding: int = 1004
    """Columns reserved for a pluggable speech embedder, zero-filled by default."""

    def __post_init__(self) -> None:
        """Validate widths."""
        for name, width in self.widths.items():
            if name == "external_embedding":
                if width < 0:
                    raise ValueError("External embedding width must be non-negative")
            elif width <= 0:
                raise ValueError(f"Audio feature width of {name} must be positive, got {width}")
        if self.pitch != 2:
            raise ValueError("Pitch slice holds f0 and voicing flag, width must be 2")
        if self.mfcc > self.mel_spectrum:
            raise ValueError("Number of MFCCs cannot exceed the number of mel bands")

    @property
    def widths(self) -> dict[str, int]:
        """Widths in column order."""
        return {
            "mfcc": self.mfcc,
            "mel_spectrum": self.mel_spectrum,
            "pitch": self.pitch,
            "energy": self.energy,
            "onsets": self.onsets,
            "external_embedding": self.external_embedding,
        }

    @property
    def dim(self) -> int:
        """Total audio feature dimension A."""
        return sum(self.widths.values())

    @property
    def slices(self) -> dict[str, slice]:
        """Column slices of every feature."""
        out: dict[str, slice] = {}
        start = 0
        for name, width in self.widths.items():
            out[name] = slice(start, start + width)
            start += width
        return out

    def dict(self) -> dict[str, int]:
        """Return layout widths as dictionary."""
        return dict(self.widths)


@dataclass(frozen=True, eq=False)
class ConditionBundle:
    """Condition of one sample: text embedding d and frame-aligned audio features a.

    An absent modality is stored as an all-zero tensor of the correct shape, the flags record
    which modality carries information.
    """

    text_embedding: np.ndarray
    """Text embedding, shape (text_dim,)."""

    audio_features: np.ndarray
    """Audio features aligned to the motion frames, shape (T_M, A)."""

    has_text: bool
    """True if the text embedding carries a description."""

    has_audio: bool
    """True if the audio features carry speech."""

    def __post_init__(self) -> None:
        """Validate shapes and absent-modality convention."""
        if self.text_embedding.ndim != 1:
            raise ValueError(f"Text embedding must be a vector, got shape {self.text_embedding.shape}")
        if self.audio_features.ndim != 2:
            raise ValueError(f"Audio features must be a (T_M, A) matrix, got shape {self.audio_features.shape}")
        if not (np.isfinite(self.text_embedding).all() and np.isfinite(self.audio_features).all()):
            raise ValueError("Condition bundle contains non-finite values")
        if not self.has_text and np.any(self.text_embedding):
            raise ValueError("Absent text must be represented by a zero embedding")
        if not self.has_audio and np.any(self.audio_features):
            raise ValueError("Absent audio must be represented by zero features")

    @classmethod
    def create(
        cls,
        num_frames: int,
        audio_dim: int,
        text_embedding: np.ndarray | None = None,
        audio_features: np.ndarray | None = None,
        text_dim: int = TEXT_EMBEDDING_DIM,
    ) -> "ConditionBundle":
        """Create a bundle, zero-filling the missing modalities.

        Parameters
        ----------
        num_frames
            Number of motion frames T_M
        audio_dim
            Audio feature dimension A
        text_embedding, optional
            Text embedding, by default None (absent)
        audio_features, optional
            Frame-aligned audio features, by default None (absent)
        text_dim, optional
            Text embedding dimension, by default 512

        Returns
        -------
            Condition bundle
        """
        has_text = text_embedding is not None and bool(np.any(text_embedding))
        has_audio = audio_features is not None
        text = np.zeros(text_dim) if text_embedding is None else np.asarray(text_embedding, dtype=float)
        audio = np.zeros((num_frames, audio_dim)) if audio_features is None else np.asarray(audio_features, dtype=float)
        if text.shape != (text_dim,):
            raise ValueError(f"Text embedding must have {text_dim} entries, got {text.shape}")
        if audio.shape != (num_frames, audio_dim):
            raise ValueError(f"Audio features must have shape {(num_frames, audio_dim)}, got {audio.shape}")
        return cls(text_embedding=text, audio_features=audio, has_text=has_text, has_audio=has_audio)

    @property
    def num_frames(self) -> int:
        """Number of frames the audio is aligned to."""
        return int(self.audio_features.shape[0])

    def audio_only(self) -> "ConditionBundle":
        """Return c2 = [empty, a], the bundle with the text embedding replaced by zeros."""
        return replace(self, text_embedding=np.zeros_like(self.text_embedding), has_text=False)

    def cropped(self, start: int, stop: int) -> "ConditionBundle":
        """Return the bundle restricted to frames [start, stop)."""
        return replace(self, audio_features=self.audio_features[start:stop])
