"""Test normalization, windowing, weighted sampling, splits and the synthetic corpus."""
import itertools

import numpy as np
import pytest
from scipy import stats

from gesture_engine.dataset.normalization import NormStats, fit_norm_stats
from gesture_engine.dataset.padding import pad_or_crop, prepare_window
from gesture_engine.dataset.sampling import weighted_sampler
from gesture_engine.dataset.splits import assign_splits, filter_text_lengths
from gesture_engine.dataset.synthetic import (
    SYNTHETIC_FOOT_JOINTS,
    arm_feature_column,
    family_clip,
    make_synthetic_corpus,
)
from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_dataset_entry import DatasetEntry
from gesture_engine.interfaces.interface_engine_parameter import MotionConfig
from gesture_engine.interfaces.interface_feature_layout import FeatureLayout, FeatureSequence
from gesture_engine.motion_repr.canonicalize import canonicalize
from gesture_engine.motion_repr.features import encode_features


def test_norm_stats():
    """Test zero mean and unit variance after normalization and the floored constant dimension."""
    rng = np.random.default_rng(seed=0)
    matrices = [rng.normal(3.0, 2.0, size=(50, 4)), rng.normal(3.0, 2.0, size=(70, 4))]
    for matrix in matrices:
        matrix[:, 2] = 5.0
    norm = fit_norm_stats(matrices, std_floor=1e-6)
    pooled = norm.apply(np.concatenate(matrices))

    np.testing.assert_allclose(pooled.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(pooled.std(axis=0)[[0, 1, 3]], 1.0)
    assert norm.std[2] == 1e-6
    np.testing.assert_array_equal(pooled[:, 2], 0.0)
    np.testing.assert_allclose(norm.invert(pooled), np.concatenate(matrices))


def test_norm_stats_errors():
    """Test sequence count, dimension and positivity checks."""
    with pytest.raises(ValueError):
        fit_norm_stats([np.zeros((5, 3))])
    with pytest.raises(ValueError):
        fit_norm_stats([np.zeros((5, 3)), np.zeros((5, 4))])
    with pytest.raises(ValueError):
        NormStats(mean=np.zeros(3), std=np.array([1.0, 0.0, 1.0]))


@pytest.mark.parametrize("length", [180, 100, 400])
def test_pad_or_crop(length):
    """Test padding, identity and contiguous cropping to 180 frames."""
    features = np.repeat(np.arange(1.0, length + 1)[:, None], 3, axis=1)
    window, valid = pad_or_crop(features, 180, np.random.default_rng(0))

    assert window.shape == (180, 3)
    assert valid.sum() == min(length, 180)
    if length <= 180:
        np.testing.assert_array_equal(window[:length], features)
        np.testing.assert_array_equal(window[length:], 0.0)
    else:
        np.testing.assert_array_equal(np.diff(window[:, 0]), 1.0)
        assert 1 <= window[0, 0] <= length - 179


def test_pad_without_draw():
    """Test that short sequences do not consume random numbers."""
    rng = np.random.default_rng(seed=3)
    pad_or_crop(np.ones((20, 2)), 30, rng)
    assert rng.random() == np.random.default_rng(seed=3).random()
    with pytest.raises(ValueError):
        pad_or_crop(np.zeros((0, 2)), 30, rng)


def test_prepare_window():
    """Test that motion and audio are cropped with the same window."""
    frames = np.arange(400.0)
    bundle = ConditionBundle.create(400, 2, audio_features=np.stack([frames, frames], axis=-1), text_dim=4)
    entry = DatasetEntry(frames[:, None] * np.ones((1, 5)), bundle, "audio", 400)
    features, audio, valid = prepare_window(entry, 180, np.random.default_rng(1))
    np.testing.assert_array_equal(features[:, 0], audio[:, 0])
    assert valid.all()


def test_weighted_sampler():
    """Test equal dataset weights over unequal sizes and uniform element draws."""
    sampler = weighted_sampler([10, 1000], [1.0, 1.0], np.random.default_rng(0))
    draws = np.array(list(itertools.islice(sampler, 100_000)))
    first = draws[draws[:, 0] == 0, 1]

    assert first.size / draws.shape[0] == pytest.approx(0.5, abs=0.01)
    assert first.max() < 10 and draws[:, 1].max() < 1000
    assert stats.chisquare(np.bincount(first, minlength=10)).pvalue > 1e-4


@pytest.mark.parametrize(
    ("sizes", "weights"),
    [([3, 4], [0.0, 0.0]), ([3, 4], [1.0, -1.0]), ([3, 4], [1.0]), ([0, 4], [1.0, 1.0]), ([3], [np.inf])],
)
def test_weighted_sampler_errors(sizes, weights):
    """Test weight validation."""
    with pytest.raises(ValueError):
        weighted_sampler(sizes, weights, np.random.default_rng(0))


def test_zero_weight_dataset():
    """Test that a dataset with weight 0 is never drawn."""
    sampler = weighted_sampler([5, 0], [1.0, 0.0], np.random.default_rng(0))
    assert all(dataset == 0 for dataset, _ in itertools.islice(sampler, 1000))


def test_assign_splits():
    """Test split sizes, determinism and name uniqueness."""
    names = [f"clip_{k:03d}" for k in range(100)]
    splits = assign_splits(names, (8, 1, 1), np.random.default_rng(0))
    counts = {name: list(splits.values()).count(name) for name in ("train", "val", "test")}

    assert counts == {"train": 80, "val": 10, "test": 10}
    assert splits == assign_splits(names, (8, 1, 1), np.random.default_rng(0))
    with pytest.raises(ValueError):
        assign_splits(["a", "b", "a"], (8, 1, 1), np.random.default_rng(0))


def test_filter_text_lengths():
    """Test that only text-conditioned entries outside of the range are dropped."""
    text = np.ones(4) / 2.0

    def _entry(frames, with_text):
        bundle = ConditionBundle.create(frames, 2, text if with_text else None, text_dim=4)
        return DatasetEntry(np.zeros((frames, 3)), bundle, "x", frames, f"{frames}_{with_text}")

    entries = [_entry(5, True), _entry(50, True), _entry(300, True), _entry(5, False), _entry(300, False)]
    kept = filter_text_lengths(entries, 40, 180)
    assert [entry.name for entry in kept] == ["50_True", "5_False", "300_False"]


def test_synthetic_corpus(toy_config):
    """Test corpus size, feature dimension and still-family velocities."""
    corpus = make_synthetic_corpus(toy_config, np.random.default_rng(0))
    layout = FeatureLayout.from_dim(59)

    assert len(corpus.text_entries) == 9
    assert len(corpus.audio_entries) == 3
    assert corpus.skeleton.num_joints == 5
    for entry in corpus.entries:
        assert entry.features.shape[1] == 59
        assert np.isfinite(entry.features).all()
    for entry in corpus.text_entries:
        assert 10 <= entry.num_frames <= 40
        assert entry.bundle.has_text and not entry.bundle.has_audio
    for entry in corpus.audio_entries:
        assert entry.bundle.audio_features.shape == (30, 16)
        assert entry.bundle.has_audio and not entry.bundle.has_text

    still = [entry for entry in corpus.text_entries if entry.name.startswith("still")]
    assert len(still) == 3
    for entry in still:
        sequence = FeatureSequence(entry.features, layout)
        np.testing.assert_allclose(sequence.group("velocities"), 0.0, atol=1e-9)
        np.testing.assert_allclose(sequence.group("root_linear_velocity"), 0.0, atol=1e-9)


def test_synthetic_corpus_seeded(toy_config):
    """Test that equal seeds give equal corpora."""
    digest = make_synthetic_corpus(toy_config, np.random.default_rng(4)).digest()
    assert make_synthetic_corpus(toy_config, np.random.default_rng(4)).digest() == digest
    assert make_synthetic_corpus(toy_config, np.random.default_rng(5)).digest() != digest


def test_wave_frequency():
    """Test that the waving arm oscillates at 1.5 Hz, bin 15 of a 10 s clip."""
    motion = MotionConfig(foot_joints=SYNTHETIC_FOOT_JOINTS)
    clip = canonicalize(family_clip("wave", 200, 0.8, motion.fps), motion.target_height)
    features = encode_features(clip.skeleton, clip, motion)
    column = features.data[:, arm_feature_column(clip.skeleton, features.layout.slices)]
    spectrum = np.abs(np.fft.rfft(column - column.mean()))
    assert int(np.argmax(spectrum)) == 15

    with pytest.raises(ValueError):
        family_clip("dance", 10, 0.5, 20.0)
