"""Composition of long motion from a prompt script."""
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from gesture_engine.conditioning.audio_features import (
    SpeechEmbedder,
    align_audio_to_frames,
    extract_audio_features,
    read_wav,
)
from gesture_engine.conditioning.text_encoder import HashingTextEncoder, TextEncoder, embed_text
from gesture_engine.diffusion.sampler import Denoiser, sample_loop
from gesture_engine.diffusion.schedule import NoiseSchedule
from gesture_engine.doubletake.handshake import blend_handshake, handshake_starts, segment_offsets, unfold
from gesture_engine.doubletake.masks import build_transition_masks, transition_window
from gesture_engine.doubletake.refinement import refine_sandwich
from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_engine_parameter import EngineConfig, HandshakeConfig
from gesture_engine.interfaces.interface_feature_layout import FeatureLayout, FeatureSequence

log = logging.getLogger("DblTake")


@dataclass(frozen=True)
class Segment:
    """One entry of a prompt script."""

    text: str
    """Text description, empty for speech-only segments."""

    audio: str | None
    """Path of a 16 kHz mono WAV file, relative to the script, or None."""

    frames: int
    """Number of frames generated for the segment."""

    gamma: float = 1.0
    """Guidance weight of the segment."""

    def __post_init__(self) -> None:
        """Validate segment."""
        if self.frames < 1:
            raise ValueError(f"Segment frames must be positive, got {self.frames}")


@dataclass(frozen=True)
class PromptScript:
    """Ordered segments of a long motion."""

    segments: tuple[Segment, ...]
    """Segments in playback order."""

    def __post_init__(self) -> None:
        """Validate script."""
        if not self.segments:
            raise ValueError("Prompt script must contain at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def from_json(cls, data: list[dict[str, Any]]) -> "PromptScript":
        """Create a script from its decoded JSON document."""
        if not isinstance(data, list):
            raise ValueError("Prompt script must be a JSON array of segments")
        try:
            segments = tuple(
                Segment(
                    text=str(item.get("text") or ""),
                    audio=item.get("audio"),
                    frames=int(item["frames"]),
                    gamma=float(item.get("gamma", 1.0)),
                )
                for item in data
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"Invalid prompt script segment: {exc}") from exc
        return cls(segments)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "PromptScript":
        """Read a prompt script file."""
        with open(path, encoding="utf-8") as file:
            try:
                return cls.from_json(json.load(file))
            except json.JSONDecodeError as exc:
                raise ValueError(f"Prompt script {path} is not valid JSON: {exc}") from exc

    def check_lengths(self, handshake_size: int) -> None:
        """Raise ValueError if a segment is shorter than two handshakes."""
        for k, segment in enumerate(self.segments):
            if segment.frames < 2 * handshake_size:
                raise ValueError(
                    f"Segment {k} has {segment.frames} frames, composition requires >= 2h = {2 * handshake_size}"
                )


@dataclass(frozen=True, eq=False)
class SegmentCondition:
    """Condition and guidance weight of a segment."""

    bundle: ConditionBundle
    gamma: float

    @property
    def frames(self) -> int:
        """Number of frames of the segment."""
        return self.bundle.num_frames


def segment_conditions(
    script: PromptScript,
    config: EngineConfig,
    base_dir: str | os.PathLike = ".",
    encoder: TextEncoder | None = None,
    embedder: SpeechEmbedder | None = None,
) -> list[SegmentCondition]:
    """Embed text and extract audio features of every script segment.

    Parameters
    ----------
    script
        Prompt script
    config
        Engine configuration, provides the audio layout and the text dimensions
    base_dir, optional
        Directory relative audio paths are resolved against, by default "."
    encoder, optional
        Text encoder, by default the hashing encoder
    embedder, optional
        Speech embedder of the external audio columns, by default None

    Returns
    -------
        One condition per segment
    """
    encoder = encoder or HashingTextEncoder(config.denoiser.text_dim)
    conditions = []
    for segment in script.segments:
        embedding = embed_text(segment.text, encoder, config.dataset.max_text_tokens) if segment.text else None
        audio = None
        if segment.audio is not None:
            pcm = read_wav(Path(base_dir) / segment.audio)
            audio = align_audio_to_frames(extract_audio_features(pcm, config.audio, embedder=embedder), segment.frames)
        bundle = ConditionBundle.create(
            segment.frames, config.audio.dim, embedding, audio, text_dim=config.denoiser.text_dim
        )
        conditions.append(SegmentCondition(bundle, segment.gamma))
    return conditions


@dataclass(frozen=True, eq=False)
class Composition:
    """Result of a composition."""

    features: FeatureSequence
    """Composed (normalized) feature sequence."""

    first_take: np.ndarray
    """Unfolded first take before refinement."""

    metadata: dict[str, Any] = field(default_factory=dict)
    """Mapping of output frames to segments and handshakes."""


def _unfold_audio(conditions: list[SegmentCondition], handshake_size: int) -> np.ndarray:
    """Unfold the segment audio, handshake frames take the audio of the later segment."""
    audio = [c.bundle.audio_features for c in conditions]
    heads = [a[:handshake_size] for a in audio[1:]]
    return unfold(audio, heads, handshake_size)


def _sandwich_conditions(
    conditions: list[SegmentCondition], owner: np.ndarray, audio: np.ndarray, start: int, stop: int
) -> tuple[list[tuple[ConditionBundle, float]], np.ndarray]:
    """Build sandwich-aligned bundles of all segments owning frames in [start, stop)."""
    segments, ownership = np.unique(owner[start:stop], return_inverse=True)
    has_audio = any(c.bundle.has_audio for c in conditions)
    bundles = []
    for k in segments:
        source = conditions[int(k)].bundle
        text = source.text_embedding if source.has_text else None
        bundle = ConditionBundle.create(
            stop - start, audio.shape[1], text, audio[start:stop] if has_audio else None, source.text_embedding.size
        )
        bundles.append((bundle, conditions[int(k)].gamma))
    return bundles, ownership


def compose_long(
    denoiser: Denoiser,
    conditions: list[SegmentCondition],
    config: HandshakeConfig,
    schedule: NoiseSchedule,
    rng: np.random.Generator,
) -> Composition:
    """Compose one long motion from independently generated segments.

    Every segment is sampled with its own child generator, adjacent clips are joined by blended handshakes
    and every transition sandwich is refined in order. A single segment is returned as sampled.

    Parameters
    ----------
    denoiser
        Clean-sample predictor
    conditions
        Condition and guidance weight per segment
    config
        Handshake parameters
    schedule
        Noise schedule
    rng
        Seeded generator, spawns one child per segment and per transition

    Returns
    -------
        Composed sequence of ``sum(frames) - (n - 1) h`` frames with boundary metadata

    Raises
    ------
    ValueError
        Empty script or a segment shorter than 2h
    """
    if not conditions:
        raise ValueError("Composition requires at least one segment")
    h = config.handshake_size
    lengths = [c.frames for c in conditions]
    if min(lengths) < 2 * h:
        raise ValueError(f"Segment lengths {lengths} violate frames >= 2h = {2 * h}")
    children = rng.spawn(2 * len(conditions) - 1)

    clips = [
        sample_loop(denoiser, c.bundle, c.gamma, c.frames, schedule, children[k]).data
        for k, c in enumerate(conditions)
    ]
    log.info("First take: %d segments of %s frames", len(clips), lengths)
    handshakes = [blend_handshake(prev[-h:], nxt[:h], h) for prev, nxt in zip(clips[:-1], clips[1:])]
    first_take = unfold(clips, handshakes, h)

    offsets = segment_offsets(lengths, h)
    owner = np.zeros(first_take.shape[0], dtype=int)
    for k, offset in enumerate(offsets[1:], start=1):
        owner[offset:] = k
    audio = _unfold_audio(conditions, h)

    refined = first_take.copy()
    windows = []
    for k, start in enumerate(handshake_starts(lengths, h)):
        window = transition_window(start, first_take.shape[0], config)
        masks = build_transition_masks(window.context, config)
        bundles, ownership = _sandwich_conditions(conditions, owner, audio, window.start, window.stop)
        refined[window.start: window.stop] = refine_sandwich(
            denoiser, refined[window.start: window.stop], masks, bundles, ownership, config, schedule,
            children[len(conditions) + k],
        )
        windows.append(window)
    if windows:
        log.info("Second take: refined %d transitions from step %d", len(windows), config.refine_steps)

    stops = offsets[1:] + [first_take.shape[0]]
    metadata = {
        "handshake_size": h,
        "total_frames": int(first_take.shape[0]),
        "segments": [
            {"index": k, "frames": lengths[k], "gamma": conditions[k].gamma, "output_start": offsets[k],
             "output_stop": stops[k]}
            for k in range(len(conditions))
        ],
        "handshakes": [
            {"index": k, "start": w.handshake_start, "stop": w.handshake_stop, "window": [w.start, w.stop]}
            for k, w in enumerate(windows)
        ],
    }
    layout = FeatureLayout.from_dim(first_take.shape[1])
    return Composition(FeatureSequence(refined, layout), first_take, metadata)
