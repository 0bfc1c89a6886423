"""Synthetic desk-scale corpus with text- and audio-conditioned motion.

The skeleton has a pelvis root with two feet, a head and a right arm attached to it. Text-conditioned
sequences come from three motion families with fixed frequency signatures, audio-conditioned sequences
move the arm while a tone is audible.
"""
import hashlib
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from gesture_engine.conditioning.audio_features import (
    HOP_LENGTH,
    SAMPLE_RATE,
    align_audio_to_frames,
    extract_audio_features,
)
from gesture_engine.conditioning.text_encoder import HashingTextEncoder, embed_text
from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_dataset_entry import DatasetEntry
from gesture_engine.interfaces.interface_engine_parameter import EngineConfig, MotionConfig
from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.interfaces.interface_skeleton import Joint, Skeleton
from gesture_engine.motion_repr.canonicalize import canonicalize
from gesture_engine.motion_repr.features import encode_features
from gesture_engine.motion_repr.kinematics import rest_height
from gesture_engine.motion_repr.rotations import rotation_to_quaternion

log = logging.getLogger("Dataset")

SYNTHETIC_SKELETON = Skeleton(
    (
        Joint("pelvis", None, (0.0, 0.0, 0.0)),
        Joint("left_foot", 0, (0.1, -0.9, 0.0), end_site=(0.0, 0.0, 0.12)),
        Joint("right_foot", 0, (-0.1, -0.9, 0.0), end_site=(0.0, 0.0, 0.12)),
        Joint("head", 0, (0.0, 0.6, 0.0), end_site=(0.0, 0.15, 0.0)),
        Joint("right_arm", 0, (-0.25, 0.45, 0.0), end_site=(-0.6, 0.0, 0.0)),
    )
)
SYNTHETIC_FOOT_JOINTS: tuple[str, ...] = ("left_foot", "left_foot", "right_foot", "right_foot")
ROOT_HEIGHT: float = 0.9
ARM_JOINT: str = "right_arm"

FAMILY_PROMPTS: dict[str, str] = {
    "wave": "a person waves the right arm",
    "walk": "a person walks forward",
    "still": "a person stands still",
}
FAMILY_FREQUENCY: dict[str, float] = {"wave": 1.5, "walk": 1.0, "still": 0.0}
SPEECH_ARM_FREQUENCY: float = 2.0
TONE_FREQUENCY: float = 220.0


@dataclass(frozen=True, eq=False)
class SyntheticCorpus:
    """Synthetic text- and audio-conditioned datasets on a common skeleton."""

    skeleton: Skeleton
    """Canonical (scaled) skeleton of all clips."""

    motion: MotionConfig
    """Motion configuration used for encoding."""

    text_entries: list[DatasetEntry]
    """Text-conditioned entries, audio zero-filled."""

    audio_entries: list[DatasetEntry]
    """Audio-conditioned entries, text zero-filled."""

    @property
    def entries(self) -> list[DatasetEntry]:
        """All entries, text-conditioned first."""
        return self.text_entries + self.audio_entries

    def digest(self) -> str:
        """SHA-256 digest over names, features and conditions of all entries."""
        sha = hashlib.sha256()
        for entry in self.entries:
            sha.update(entry.name.encode("utf-8"))
            sha.update(np.ascontiguousarray(entry.features).tobytes())
            sha.update(np.ascontiguousarray(entry.bundle.text_embedding).tobytes())
            sha.update(np.ascontiguousarray(entry.bundle.audio_features).tobytes())
        return sha.hexdigest()


def arm_feature_column(skeleton: Skeleton, layout_slices: dict[str, slice]) -> int:
    """Column of the arm joint's 6D entry that follows a rotation about Z (first column, y component)."""
    return layout_slices["rotations"].start + 6 * (skeleton.index(ARM_JOINT) - 1) + 1


def _rotation_about(axis: int, angles: np.ndarray) -> np.ndarray:
    rotvec = np.zeros((angles.size, 3))
    rotvec[:, axis] = angles
    return rotation_to_quaternion(Rotation.from_rotvec(rotvec), (angles.size,))


def family_clip(family: str, num_frames: int, amplitude: float, fps: float, speed: float = 0.8) -> MotionClip:
    """Raw clip of a motion family on the synthetic skeleton.

    Parameters
    ----------
    family
        One of wave, walk and still
    num_frames
        Number of frames
    amplitude
        Rotation amplitude in radians
    fps
        Frame rate
    speed, optional
        Walking speed in m/s, by default 0.8
    """
    if family not in FAMILY_PROMPTS:
        raise ValueError(f"Unknown motion family {family!r}")
    skeleton = SYNTHETIC_SKELETON
    time = np.arange(num_frames) / fps
    rotations = np.zeros((num_frames, skeleton.num_joints, 4))
    rotations[..., 0] = 1.0
    translation = np.tile([0.0, ROOT_HEIGHT, 0.0], (num_frames, 1))
    phase = 2 * np.pi * FAMILY_FREQUENCY[family] * time
    if family == "wave":
        rotations[:, skeleton.index(ARM_JOINT)] = _rotation_about(2, amplitude * np.sin(phase))
    elif family == "walk":
        rotations[:, skeleton.index("left_foot")] = _rotation_about(0, amplitude * np.sin(phase))
        rotations[:, skeleton.index("right_foot")] = _rotation_about(0, -amplitude * np.sin(phase))
        translation[:, 2] = speed * time
    return MotionClip(skeleton, fps, translation, rotations)


def _speech_envelope(num_frames: int, rng: np.random.Generator) -> np.ndarray:
    envelope = np.zeros(num_frames)
    position, speaking = 0, bool(rng.integers(2))
    while position < num_frames:
        length = int(rng.integers(10, 31))
        envelope[position: position + length] = float(speaking)
        position += length
        speaking = not speaking
    return envelope


def speech_sample(num_frames: int, fps: float, rng: np.random.Generator) -> tuple[MotionClip, np.ndarray]:
    """Tone with pauses and the arm motion following it.

    Returns
    -------
        Raw clip and 16 kHz samples covering ``num_frames`` hops
    """
    envelope = _speech_envelope(num_frames, rng)
    samples = np.arange(num_frames * HOP_LENGTH) / SAMPLE_RATE
    pcm = 0.5 * np.repeat(envelope, HOP_LENGTH) * np.sin(2 * np.pi * TONE_FREQUENCY * samples)

    skeleton = SYNTHETIC_SKELETON
    time = np.arange(num_frames) / fps
    rotations = np.zeros((num_frames, skeleton.num_joints, 4))
    rotations[..., 0] = 1.0
    angle = 0.8 * envelope * np.sin(2 * np.pi * SPEECH_ARM_FREQUENCY * time)
    rotations[:, skeleton.index(ARM_JOINT)] = _rotation_about(2, angle)
    translation = np.tile([0.0, ROOT_HEIGHT, 0.0], (num_frames, 1))
    return MotionClip(skeleton, fps, translation, rotations), pcm


def make_synthetic_corpus(config: EngineConfig, rng: np.random.Generator) -> SyntheticCorpus:
    """Generate the synthetic corpus.

    Parameters
    ----------
    config
        Engine configuration, uses frame rate, target height, audio layout and the dataset section
    rng
        Seeded generator, identical seeds give identical corpora

    Returns
    -------
        Synthetic corpus with encoded (unnormalized) features
    """
    motion = config.motion.update(foot_joints=SYNTHETIC_FOOT_JOINTS)
    dataset = config.dataset
    audio_dim = config.audio.dim
    text_dim = config.denoiser.text_dim
    encoder = HashingTextEncoder(text_dim)

    skeleton = SYNTHETIC_SKELETON.scaled(motion.target_height / rest_height(SYNTHETIC_SKELETON))

    def _encode(clip: MotionClip) -> np.ndarray:
        canonical = canonicalize(clip, motion.target_height)
        return encode_features(canonical.skeleton, canonical, motion).data

    text_entries = []
    for family, prompt in FAMILY_PROMPTS.items():
        embedding = embed_text(prompt, encoder, dataset.max_text_tokens)
        for k in range(dataset.synthetic_entries_per_family):
            num_frames = int(rng.integers(dataset.min_text_frames, dataset.max_text_frames + 1))
            amplitude = float(rng.uniform(0.6, 1.0))
            speed = float(rng.uniform(0.6, 1.0))
            features = _encode(family_clip(family, num_frames, amplitude, motion.fps, speed))
            bundle = ConditionBundle.create(num_frames, audio_dim, text_embedding=embedding, text_dim=text_dim)
            text_entries.append(DatasetEntry(features, bundle, "synthetic_text", num_frames, f"{family}_{k:03d}"))

    audio_entries = []
    for k in range(dataset.synthetic_audio_entries):
        num_frames = dataset.synthetic_audio_frames
        clip, pcm = speech_sample(num_frames, motion.fps, rng)
        features = _encode(clip)
        audio = align_audio_to_frames(extract_audio_features(pcm, config.audio), num_frames)
        bundle = ConditionBundle.create(num_frames, audio_dim, audio_features=audio, text_dim=text_dim)
        audio_entries.append(DatasetEntry(features, bundle, "synthetic_audio", num_frames, f"speech_{k:03d}"))

    log.info("Synthetic corpus: %d text and %d audio entries", len(text_entries), len(audio_entries))
    return SyntheticCorpus(skeleton, motion, text_entries, audio_entries)
