"""Measure the desk-scale model trained on the synthetic corpus."""
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from gesture_engine.conditioning.text_encoder import HashingTextEncoder, embed_text
from gesture_engine.dataset.normalization import fit_norm_stats
from gesture_engine.dataset.synthetic import FAMILY_FREQUENCY, FAMILY_PROMPTS, arm_feature_column, make_synthetic_corpus
from gesture_engine.denoiser.model import GestureDenoiser, NetworkDenoiser
from gesture_engine.denoiser.training import train
from gesture_engine.diffusion.sampler import sample_loop
from gesture_engine.diffusion.schedule import cosine_schedule
from gesture_engine.doubletake.composition import SegmentCondition, compose_long
from gesture_engine.doubletake.handshake import boundary_discontinuity
from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_feature_layout import FeatureLayout
from gesture_engine.utilities.load_config import load_config

DESK_CONFIG = Path(__file__).parents[2] / "desk_config.yaml"


@pytest.fixture(scope="module")
def desk_model():
    """Train the desk configuration once on the synthetic corpus.

    Returns
    -------
        Configuration, corpus, normalization statistics, training result, schedule and sampling denoiser
    """
    config = load_config(DESK_CONFIG)
    corpus = make_synthetic_corpus(config, np.random.default_rng(0))
    norm = fit_norm_stats(corpus.entries)
    sources: dict[str, list] = {}
    for entry in corpus.entries:
        sources.setdefault(entry.source, []).append(replace(entry, features=norm.apply(entry.features)))
    diffusion = config.diffusion
    schedule = cosine_schedule(diffusion.num_steps, diffusion.cosine_offset, diffusion.alpha_floor)
    model = GestureDenoiser(config.denoiser)
    result = train(model, sources, config.training, schedule, diffusion.num_frames, np.random.default_rng(0))
    return config, corpus, norm, result, schedule, NetworkDenoiser(model)


def _text_bundle(config, prompt: str, num_frames: int) -> ConditionBundle:
    embedding = embed_text(prompt, HashingTextEncoder(config.denoiser.text_dim), config.dataset.max_text_tokens)
    return ConditionBundle.create(num_frames, config.audio.dim, embedding, text_dim=config.denoiser.text_dim)


@pytest.mark.slow
def test_desk_training_converges(desk_model):
    """Test that the desk configuration reduces the training loss on the synthetic corpus."""
    _, _, _, result, _, _ = desk_model
    curve = np.asarray(result.loss_curve)
    assert curve[-100:].mean() < 0.25 * curve[:10].mean()


@pytest.mark.slow
def test_desk_wave_frequency(desk_model):
    """Test that generated waving oscillates at the trained frequency within one FFT bin in 8 of 10 samples."""
    config, corpus, norm, _, schedule, denoiser = desk_model
    num_frames = config.diffusion.num_frames
    bundle = _text_bundle(config, FAMILY_PROMPTS["wave"], num_frames)
    column = arm_feature_column(corpus.skeleton, FeatureLayout.from_dim(config.denoiser.feature_dim).slices)
    target_bin = FAMILY_FREQUENCY["wave"] * num_frames / config.motion.fps

    hits = 0
    for seed in range(10):
        sample = sample_loop(denoiser, bundle, 1.0, num_frames, schedule, np.random.default_rng(seed))
        arm = norm.invert(sample.data)[:, column]
        spectrum = np.abs(np.fft.rfft(arm - arm.mean()))
        hits += int(abs(int(np.argmax(spectrum)) - target_bin) <= 1.0)
    assert hits >= 8


@pytest.mark.slow
def test_desk_refinement_continuity(desk_model):
    """Test that refinement lowers the discontinuity around handshakes over 20 two-segment scripts."""
    config, _, _, _, schedule, denoiser = desk_model
    handshake = config.handshake
    prompts = list(FAMILY_PROMPTS.values())

    before, after = [], []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        choice = rng.choice(len(prompts), size=2, replace=False)
        lengths = rng.integers(2 * handshake.handshake_size, config.diffusion.num_frames + 1, size=2)
        conditions = [
            SegmentCondition(_text_bundle(config, prompts[k], int(n)), 1.0) for k, n in zip(choice, lengths)
        ]
        composition = compose_long(denoiser, conditions, handshake, schedule, rng)
        spans = [(h["start"], h["stop"]) for h in composition.metadata["handshakes"]]
        before.append(boundary_discontinuity(composition.first_take, spans, handshake.blend_length))
        after.append(boundary_discontinuity(composition.features.data, spans, handshake.blend_length))
    assert np.mean(after) <= np.mean(before)
