"""Interface classes for the engine configuration sections.

Every section is a frozen dataclass, i.e. immutable and hashable.
A modified copy is obtained with ``section.update(field=value)``, a wrapper around ``dataclasses.replace``.
Preconditions of the module owning a section are checked at construction, so an invalid configuration
fails when the configuration file is loaded and not in the middle of a command.
"""
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any

from gesture_engine.errors import ConfigValidationError
from gesture_engine.interfaces.interface_condition_bundle import TEXT_EMBEDDING_DIM, AudioFeatureLayout


class LossKind(str, Enum):
    """Enum for training losses."""

    HUBER = "huber"
    MSE = "mse"


class _Section:
    """Helper methods shared by the configuration sections."""

    def dict(self, use_strings: bool = False) -> dict:
        """Return section as dictionary.

        Parameters
        ----------
        use_strings, optional
            boolean flag indicating if values of dictionary should be represented as strings, by default False
        """
        if use_strings:
            return {k: str(v) for k, v in asdict(self).items()}  # type: ignore[call-overload]
        return asdict(self)  # type: ignore[call-overload]

    def update(self, /, **changes) -> Any:
        """Create a modified copy of the section, wrapper for ``dataclasses.replace()``."""
        return replace(self, **changes)  # type: ignore[type-var]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigValidationError(message)


@dataclass(frozen=True)
class MotionConfig(_Section):
    """Motion processing parameters."""

    fps: float = 20.0
    """Frame rate all motion is resampled to."""

    target_height: float = 1.70
    """Rest-pose skeleton height in meters after canonicalization."""

    axis_map: tuple[str, str, str] = ("x", "y", "z")
    """Source axis for the engine x, y and z axis (right-handed, Y-up, +Z forward), e.g. ("x", "z", "-y")."""

    foot_joints: tuple[str, ...] = ("left_heel", "left_foot", "right_heel", "right_foot")
    """Names of the left heel, left toe, right heel and right toe joints used for foot contacts."""

    contact_speed_threshold: float = 0.10
    """Joint speed in m/s below which a foot joint is in contact."""

    def __post_init__(self) -> None:
        """Validate motion parameters."""
        _require(self.fps > 0, f"fps must be positive, got {self.fps}")
        _require(self.target_height > 0, f"target_height must be positive, got {self.target_height}")
        _require(len(self.axis_map) == 3, "axis_map requires three entries")
        _require(
            sorted(a.lstrip("-") for a in self.axis_map) == ["x", "y", "z"],
            f"axis_map must be a signed permutation of x, y, z, got {self.axis_map}",
        )
        _require(len(self.foot_joints) == 4, "foot_joints requires heel and toe joints of both feet (4 names)")
        _require(self.contact_speed_threshold > 0, "contact_speed_threshold must be positive")
        object.__setattr__(self, "axis_map", tuple(self.axis_map))
        object.__setattr__(self, "foot_joints", tuple(self.foot_joints))


@dataclass(frozen=True)
class DiffusionConfig(_Section):
    """Noise schedule and sequence length."""

    num_steps: int = 1000
    """Number of noising steps T."""

    cosine_offset: float = 0.008
    """Offset s of the cosine schedule."""

    alpha_floor: float = 0.001
    """Lower clip of the per-step alpha."""

    num_frames: int = 180
    """Motion sequence length T_M."""

    def __post_init__(self) -> None:
        """Validate schedule parameters."""
        _require(self.num_steps >= 1, f"num_steps must be >= 1, got {self.num_steps}")
        _require(self.cosine_offset >= 0, "cosine_offset must be non-negative")
        _require(0 < self.alpha_floor < 1, "alpha_floor must be in (0, 1)")
        _require(self.num_frames >= 2, f"num_frames must be >= 2, got {self.num_frames}")


@dataclass(frozen=True)
class DenoiserConfig(_Section):
    """Architecture of the denoising network."""

    feature_dim: int = 659
    """Motion feature dimension D."""

    audio_dim: int = 1133
    """Audio feature dimension A."""

    text_dim: int = TEXT_EMBEDDING_DIM
    """Text embedding dimension."""

    hidden_dim: int = 256
    """Width of the self-attention stack."""

    num_layers: int = 8
    """Number of self-attention layers."""

    num_heads: int = 4
    """Number of attention heads."""

    ff_multiplier: int = 4
    """Feed-forward width as multiple of hidden_dim."""

    max_len: int = 181
    """Maximum token count (frames + 1 condition token)."""

    use_positional_encoding: bool = True
    """Add the sinusoidal positional encoding to the token sequence."""

    zero_init_head: bool = True
    """Initialize the output projection with zeros."""

    dtype: str = "float32"
    """Parameter precision, float32 or float64."""

    def __post_init__(self) -> None:
        """Validate architecture parameters."""
        for name in ("feature_dim", "audio_dim", "text_dim", "hidden_dim", "num_layers", "num_heads",
                     "ff_multiplier", "max_len"):
            _require(getattr(self, name) > 0, f"{name} must be positive, got {getattr(self, name)}")
        _require(self.hidden_dim % self.num_heads == 0, "hidden_dim must be divisible by num_heads")
        _require(self.hidden_dim % 2 == 0, "hidden_dim must be even for sinusoidal embeddings")
        _require(self.dtype in ("float32", "float64"), f"dtype must be float32 or float64, got {self.dtype}")


@dataclass(frozen=True)
class TrainingConfig(_Section):
    """Optimizer and training loop parameters."""

    learning_rate: float = 2e-4
    """Adam learning rate."""

    betas: tuple[float, float] = (0.9, 0.999)
    """Adam moment decay rates."""

    batch_size: int = 256
    """Samples per step."""

    num_steps: int = 1_000_000
    """Number of optimizer steps."""

    mask_probability: float = 0.1
    """Bernoulli probability of replacing the text embedding by the empty condition."""

    loss_kind: LossKind = LossKind.HUBER
    """Training loss, Huber or MSE (ablation)."""

    huber_delta: float = 1.0
    """Transition point of the Huber loss."""

    log_interval: int = 100
    """Steps between loss log messages."""

    def __post_init__(self) -> None:
        """Validate training parameters."""
        _require(self.learning_rate >= 0, "learning_rate must be non-negative")
        _require(len(self.betas) == 2 and all(0 <= b < 1 for b in self.betas), "betas must be two values in [0, 1)")
        _require(self.batch_size >= 1, "batch_size must be >= 1")
        _require(self.num_steps >= 0, "num_steps must be non-negative")
        _require(0 <= self.mask_probability <= 1, "mask_probability must be in [0, 1]")
        _require(self.huber_delta > 0, "huber_delta must be positive")
        _require(self.log_interval >= 1, "log_interval must be >= 1")
        object.__setattr__(self, "loss_kind", LossKind(self.loss_kind))
        object.__setattr__(self, "betas", tuple(self.betas))


@dataclass(frozen=True)
class HandshakeConfig(_Section):
    """Long-sequence composition parameters."""

    handshake_size: int = 20
    """Handshake length h in frames."""

    blend_length: int = 10
    """Length b of the linear ramp between the hard and the soft mask."""

    hard_max: float = 0.85
    """Maximum hard-mask value."""

    soft_min: float = 0.15
    """Minimum soft-mask value."""

    refine_steps: int = 900
    """Noising steps T' of the second take."""

    context_frames: int = 20
    """Frames of each neighbouring clip included on either side of the handshake in a transition sandwich."""

    def __post_init__(self) -> None:
        """Validate handshake parameters."""
        _require(0 < self.blend_length <= self.handshake_size, "0 < blend_length <= handshake_size violated")
        _require(0 <= self.soft_min <= self.hard_max <= 1, "0 <= soft_min <= hard_max <= 1 violated")
        _require(self.refine_steps > 0, "refine_steps must be positive")
        _require(self.context_frames >= self.blend_length, "context_frames must cover the blend length")


@dataclass(frozen=True)
class DatasetConfig(_Section):
    """Dataset assembly parameters."""

    min_text_frames: int = 40
    """Shortest text-conditioned sequence kept."""

    max_text_frames: int = 180
    """Longest text-conditioned sequence kept."""

    split_ratios: tuple[int, int, int] = (8, 1, 1)
    """Train, validation and test ratio."""

    source_weights: dict[str, float] = field(default_factory=dict)
    """Sampling weight per source tag; sources without entry get equal expected draws."""

    std_floor: float = 1e-8
    """Lower bound of the normalization standard deviation."""

    max_text_tokens: int = 20
    """Maximum number of whitespace tokens passed to the text encoder."""

    synthetic_entries_per_family: int = 16
    """Text-conditioned entries per motion family in the synthetic corpus."""

    synthetic_audio_entries: int = 48
    """Audio-conditioned entries in the synthetic corpus."""

    synthetic_audio_frames: int = 240
    """Length of the synthetic audio-conditioned sequences (cropped during training)."""

    def __post_init__(self) -> None:
        """Validate dataset parameters."""
        _require(1 <= self.min_text_frames <= self.max_text_frames, "min_text_frames <= max_text_frames violated")
        _require(len(self.split_ratios) == 3 and sum(self.split_ratios) > 0, "split_ratios requires three values")
        _require(all(r >= 0 for r in self.split_ratios), "split_ratios must be non-negative")
        _require(all(w >= 0 for w in self.source_weights.values()), "source_weights must be non-negative")
        _require(self.std_floor > 0, "std_floor must be positive")
        _require(self.max_text_tokens >= 1, "max_text_tokens must be >= 1")
        object.__setattr__(self, "split_ratios", tuple(self.split_ratios))

    def __hash__(self) -> int:
        """Hash without the (unhashable) weight dictionary values."""
        return hash((self.min_text_frames, self.max_text_frames, self.split_ratios,
                     tuple(sorted(self.source_weights.items())), self.std_floor, self.max_text_tokens))


@dataclass(frozen=True)
class EngineConfig(_Section):
    """Complete engine configuration."""

    motion: MotionConfig = MotionConfig()
    audio: AudioFeatureLayout = AudioFeatureLayout()
    diffusion: DiffusionConfig = DiffusionConfig()
    denoiser: DenoiserConfig = DenoiserConfig()
    training: TrainingConfig = TrainingConfig()
    handshake: HandshakeConfig = HandshakeConfig()
    dataset: DatasetConfig = field(default_factory=DatasetConfig)

    def __post_init__(self) -> None:
        """Validate cross-section consistency."""
        _require(
            self.denoiser.audio_dim == self.audio.dim,
            f"denoiser.audio_dim ({self.denoiser.audio_dim}) must equal the audio layout total ({self.audio.dim})",
        )
        _require(
            self.denoiser.max_len >= self.diffusion.num_frames + 1,
            "denoiser.max_len must hold num_frames + 1 tokens",
        )
        _require(
            self.handshake.refine_steps <= self.diffusion.num_steps,
            f"handshake.refine_steps ({self.handshake.refine_steps}) exceeds num_steps ({self.diffusion.num_steps})",
        )

    def __hash__(self) -> int:
        """Hash of all sections."""
        return hash((self.motion, self.audio, self.diffusion, self.denoiser, self.training, self.handshake,
                     hash(self.dataset)))
