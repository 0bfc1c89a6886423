"""Test second-take refinement, long composition and prompt scripts."""
import json

import numpy as np
import pytest
from scipy.io import wavfile

from gesture_engine.conditioning.audio_features import SAMPLE_RATE
from gesture_engine.diffusion.process import q_sample
from gesture_engine.diffusion.sampler import cfg_denoise, reverse_process, sample_loop
from gesture_engine.diffusion.schedule import cosine_schedule
from gesture_engine.doubletake.composition import (
    PromptScript,
    SegmentCondition,
    compose_long,
    segment_conditions,
)
from gesture_engine.doubletake.masks import build_transition_masks
from gesture_engine.doubletake.refinement import anchor, refine_sandwich
from gesture_engine.interfaces.interface_engine_parameter import HandshakeConfig

CONFIG = HandshakeConfig(handshake_size=4, blend_length=2, context_frames=3, refine_steps=10)


def _sandwich(seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal((10, 23))


def test_anchor_exact():
    """Test that the anchor keeps the first take at weight 0 and the iterate at weight 1."""
    rng = np.random.default_rng(seed=0)
    first, iterate = rng.standard_normal((2, 4, 3))
    mixed = anchor(first, iterate, np.array([0.0, 1.0, 0.5, 0.25]))
    np.testing.assert_array_equal(mixed[0], first[0])
    np.testing.assert_array_equal(mixed[1], iterate[1])
    np.testing.assert_allclose(mixed[2], 0.5 * (first[2] + iterate[2]))


def test_refine_zero_mask(linear_denoiser, random_bundle):
    """Test that a zero mask returns the first take unchanged."""
    sandwich = _sandwich()
    masks = (np.zeros(10), np.ones(10))
    refined = refine_sandwich(
        linear_denoiser(23, 3, 4), sandwich, masks, [(random_bundle(10), 0.5)], np.zeros(10, dtype=int),
        CONFIG, cosine_schedule(20), np.random.default_rng(0),
    )
    np.testing.assert_array_equal(refined, sandwich)


def test_refine_full_mask(linear_denoiser, random_bundle):
    """Test that a unit mask equals noising to T' followed by the plain reverse process."""
    denoiser = linear_denoiser(23, 3, 4)
    bundle = random_bundle(10)
    schedule = cosine_schedule(20)
    sandwich = _sandwich()
    refined = refine_sandwich(
        denoiser, sandwich, (np.ones(10), np.ones(10)), [(bundle, 0.7)], np.zeros(10, dtype=int),
        CONFIG, schedule, np.random.default_rng(4),
    )

    rng = np.random.default_rng(4)
    noisy = q_sample(sandwich, 10, rng.standard_normal(sandwich.shape), schedule)
    expected = reverse_process(lambda x, t: cfg_denoise(denoiser, x, t, bundle, 0.7), noisy, 10, schedule, rng)
    np.testing.assert_array_equal(refined, expected)


def test_refine_oracle_fixed_point(oracle_denoiser, random_bundle):
    """Test that a denoiser predicting the first take leaves it unchanged."""
    sandwich = _sandwich()
    refined = refine_sandwich(
        oracle_denoiser(sandwich), sandwich, build_transition_masks((3, 3), CONFIG), [(random_bundle(10), 1.0)],
        np.zeros(10, dtype=int), CONFIG, cosine_schedule(20), np.random.default_rng(0),
    )
    np.testing.assert_array_equal(refined, sandwich)


def test_refine_errors(oracle_denoiser, random_bundle):
    """Test refinement step and mask length checks."""
    sandwich = _sandwich()
    denoiser = oracle_denoiser(sandwich)
    masks = build_transition_masks((3, 3), CONFIG)
    conditions = [(random_bundle(10), 1.0)]
    ownership = np.zeros(10, dtype=int)
    with pytest.raises(ValueError):
        refine_sandwich(
            denoiser, sandwich, masks, conditions, ownership, CONFIG.update(refine_steps=30), cosine_schedule(20),
            np.random.default_rng(0),
        )
    with pytest.raises(ValueError):
        refine_sandwich(
            denoiser, sandwich, (masks[0][:9], masks[1]), conditions, ownership, CONFIG, cosine_schedule(20),
            np.random.default_rng(0),
        )


def _conditions(random_bundle, lengths, gamma=0.6):
    return [SegmentCondition(random_bundle(frames), gamma) for frames in lengths]


def test_compose_layout(linear_denoiser, random_bundle):
    """Test the composed length and that frames outside the transition windows keep the first take."""
    denoiser = linear_denoiser(23, 3, 4)
    conditions = _conditions(random_bundle, [10, 12, 10])
    schedule = cosine_schedule(20)
    composition = compose_long(denoiser, conditions, CONFIG, schedule, np.random.default_rng(7))

    features, first_take = composition.features.data, composition.first_take
    assert features.shape == (24, 23)
    assert first_take.shape == (24, 23)
    np.testing.assert_array_equal(features[:4], first_take[:4])
    np.testing.assert_array_equal(features[20:], first_take[20:])
    assert not np.allclose(features[4:20], first_take[4:20])

    children = np.random.default_rng(7).spawn(5)
    first_clip = sample_loop(denoiser, conditions[0].bundle, 0.6, 10, schedule, children[0]).data
    np.testing.assert_array_equal(first_take[:6], first_clip[:6])


def test_compose_metadata(linear_denoiser, random_bundle):
    """Test the mapping of output frames to segments and handshakes."""
    composition = compose_long(
        linear_denoiser(23, 3, 4), _conditions(random_bundle, [10, 12, 10]), CONFIG, cosine_schedule(20),
        np.random.default_rng(0),
    )
    metadata = composition.metadata
    assert metadata["handshake_size"] == 4
    assert metadata["total_frames"] == 24
    assert [s["output_start"] for s in metadata["segments"]] == [0, 6, 14]
    assert [s["output_stop"] for s in metadata["segments"]] == [6, 14, 24]
    assert [(s["start"], s["stop"]) for s in metadata["handshakes"]] == [(6, 10), (14, 18)]
    assert [s["window"] for s in metadata["handshakes"]] == [[3, 13], [11, 21]]
    json.dumps(metadata)


def test_compose_single_segment(linear_denoiser, random_bundle):
    """Test that a single segment equals plain sampling with the first child generator."""
    denoiser = linear_denoiser(23, 3, 4)
    conditions = _conditions(random_bundle, [9])
    schedule = cosine_schedule(20)
    composition = compose_long(denoiser, conditions, CONFIG, schedule, np.random.default_rng(2))
    expected = sample_loop(denoiser, conditions[0].bundle, 0.6, 9, schedule, np.random.default_rng(2).spawn(1)[0])
    np.testing.assert_array_equal(composition.features.data, expected.data)
    assert composition.metadata["handshakes"] == []


def test_compose_deterministic(linear_denoiser, random_bundle):
    """Test that equal seeds give equal compositions."""
    denoiser = linear_denoiser(23, 3, 4)
    conditions = _conditions(random_bundle, [10, 10])
    schedule = cosine_schedule(20)

    def _compose(seed):
        return compose_long(denoiser, conditions, CONFIG, schedule, np.random.default_rng(seed)).features.data

    np.testing.assert_array_equal(_compose(1), _compose(1))
    assert not np.allclose(_compose(1), _compose(2))


def test_compose_constant(oracle_denoiser, random_bundle):
    """Test that a denoiser predicting one constant frame composes to that frame everywhere."""
    row = np.linspace(-1.0, 1.0, 23)
    composition = compose_long(
        oracle_denoiser(row), _conditions(random_bundle, [10, 12, 10]), CONFIG, cosine_schedule(20),
        np.random.default_rng(0),
    )
    np.testing.assert_allclose(composition.features.data, np.tile(row, (24, 1)), atol=1e-12)


def test_compose_errors(oracle_denoiser, random_bundle):
    """Test empty scripts and segments shorter than two handshakes."""
    denoiser = oracle_denoiser(np.zeros(23))
    with pytest.raises(ValueError):
        compose_long(denoiser, [], CONFIG, cosine_schedule(20), np.random.default_rng(0))
    with pytest.raises(ValueError):
        compose_long(
            denoiser, _conditions(random_bundle, [10, 7, 10]), CONFIG, cosine_schedule(20), np.random.default_rng(0)
        )
    with pytest.raises(ValueError):
        compose_long(denoiser, _conditions(random_bundle, [7]), CONFIG, cosine_schedule(20), np.random.default_rng(0))


def test_prompt_script():
    """Test segment defaults and the length check of a prompt script."""
    script = PromptScript.from_json(
        [{"text": "wave hello", "frames": 30, "gamma": 0.5}, {"audio": "speech.wav", "frames": 20}]
    )
    first, second = script.segments
    assert (first.text, first.audio, first.frames, first.gamma) == ("wave hello", None, 30, 0.5)
    assert (second.text, second.audio, second.gamma) == ("", "speech.wav", 1.0)

    script.check_lengths(10)
    with pytest.raises(ValueError):
        script.check_lengths(11)
    with pytest.raises(ValueError):
        PromptScript.from_json([{"frames": 39}]).check_lengths(20)


@pytest.mark.parametrize(
    "data",
    [{"frames": 10}, [{"text": "walk"}], [{"frames": 0}], [], [1], [{"frames": "many"}]],
)
def test_invalid_prompt_script(data):
    """Test rejection of malformed prompt scripts."""
    with pytest.raises(ValueError):
        PromptScript.from_json(data)


def test_load_prompt_script(tmp_path):
    """Test reading a script file and rejection of invalid JSON."""
    path = tmp_path / "script.json"
    path.write_text(json.dumps([{"text": "nod", "frames": 12}]), encoding="utf-8")
    assert PromptScript.load(path).segments[0].frames == 12

    path.write_text("[{", encoding="utf-8")
    with pytest.raises(ValueError):
        PromptScript.load(path)


def test_segment_conditions(toy_config, tmp_path):
    """Test text embedding and audio alignment of script segments."""
    time = np.arange(SAMPLE_RATE) / SAMPLE_RATE
    wavfile.write(tmp_path / "speech.wav", SAMPLE_RATE, (8000 * np.sin(2 * np.pi * 200 * time)).astype(np.int16))
    script = PromptScript.from_json(
        [{"text": "raise both arms", "frames": 12, "gamma": 0.4}, {"audio": "speech.wav", "frames": 16}]
    )
    text_segment, audio_segment = segment_conditions(script, toy_config, base_dir=tmp_path)

    assert text_segment.frames == 12
    assert text_segment.gamma == 0.4
    assert text_segment.bundle.has_text and not text_segment.bundle.has_audio
    assert text_segment.bundle.text_embedding.shape == (32,)
    assert audio_segment.bundle.audio_features.shape == (16, 16)
    assert audio_segment.bundle.has_audio and not audio_segment.bundle.has_text
    assert np.isfinite(audio_segment.bundle.audio_features).all()
