"""Test configuration loading, JSON encoding and diagnostic figures."""
import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from gesture_engine.errors import ConfigValidationError
from gesture_engine.interfaces.interface_engine_parameter import EngineConfig, HandshakeConfig, LossKind
from gesture_engine.utilities.json_encoder import digest, dumps, file_digest
from gesture_engine.utilities.load_config import apply_overrides, config_digest, config_from_dict, load_config
from gesture_engine.utilities.plotting import plot_loss_curve

REPO_ROOT = Path(__file__).parents[2]


def test_default_config_file():
    """Test that the shipped configuration file holds the default values."""
    assert load_config(REPO_ROOT / "engine_config.yaml") == EngineConfig()


def test_desk_config_file():
    """Test the desk-scale configuration of the synthetic corpus."""
    config = load_config(REPO_ROOT / "desk_config.yaml")
    assert config.denoiser.feature_dim == 59
    assert config.audio.dim == config.denoiser.audio_dim == 129
    assert config.training.loss_kind is LossKind.HUBER


def test_partial_config(tmp_path):
    """Test that missing sections and fields take default values."""
    path = tmp_path / "partial.yaml"
    path.write_text("training: !TrainingConfig\n  batch_size: 8\n", encoding="utf-8")
    config = load_config(path)
    assert config.training.batch_size == 8
    assert config.training.learning_rate == EngineConfig().training.learning_rate
    assert config.handshake == HandshakeConfig()

    path.write_text("", encoding="utf-8")
    assert load_config(path) == EngineConfig()


@pytest.mark.parametrize(
    "content",
    [
        "decoder: !DiffusionConfig\n  num_steps: 10\n",
        "training:\n  batch_size: 8\n",
        "training: !DiffusionConfig\n  num_steps: 10\n",
        "training: !TrainingConfig\n  batch: 8\n",
        "training: !TrainingConfig\n  batch_size: 0\n",
        "- training\n",
    ],
)
def test_invalid_config(tmp_path, content):
    """Test rejection of unknown sections, untagged sections, unknown fields and invalid values."""
    path = tmp_path / "invalid.yaml"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigValidationError):
        load_config(path)


def test_config_file_type(tmp_path):
    """Test that only yaml files are accepted."""
    path = tmp_path / "config.json"
    path.write_text("{}", encoding="utf-8")
    with pytest.raises(FileNotFoundError):
        load_config(path)


def test_overrides():
    """Test overrides of scalar and list fields and the configuration digest."""
    config = apply_overrides(EngineConfig(), ["training.learning_rate=0.01", "training.betas=[0.5, 0.9]"])
    assert config.training.learning_rate == 0.01
    assert config.training.betas == (0.5, 0.9)
    assert config_digest(config) != config_digest(EngineConfig())
    assert config_digest(EngineConfig()) == config_digest(EngineConfig())

    for override in ("training", "learning_rate=1", "decoder.num_steps=1", "training.rate=1",
                     "diffusion.num_steps=100"):
        with pytest.raises(ConfigValidationError):
            apply_overrides(EngineConfig(), [override])


def test_config_from_dict(toy_config):
    """Test rebuilding a configuration from its dictionary."""
    assert config_from_dict(toy_config.dict()) == toy_config
    assert config_from_dict(json.loads(dumps(toy_config.dict()))) == toy_config


def test_json_encoder(tmp_path):
    """Test encoding of numpy values, enums, paths and dataclasses."""
    document = json.loads(
        dumps({"b": np.arange(3), "a": np.float32(1.5), "kind": LossKind.MSE, "path": Path("x") / "y",
               "handshake": HandshakeConfig()})
    )
    assert document["a"] == 1.5
    assert document["b"] == [0, 1, 2]
    assert document["kind"] == "mse"
    assert document["path"] == str(Path("x") / "y")
    assert document["handshake"]["handshake_size"] == 20
    assert digest({"a": 1, "b": 2}) == digest({"b": 2, "a": 1})

    path = tmp_path / "data.bin"
    path.write_bytes(b"gesture")
    assert file_digest(path) == hashlib.sha256(b"gesture").hexdigest()


def test_plot_loss_curve():
    """Test the loss figure with and without moving average."""
    losses = np.exp(-np.linspace(0.0, 3.0, 100))
    _, axis = plot_loss_curve(losses, window=50)
    assert len(axis.get_lines()) == 2
    _, axis = plot_loss_curve(losses[:10], window=50)
    assert len(axis.get_lines()) == 1
