"""Test configuration file."""
import matplotlib
import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.interfaces.interface_skeleton import Joint, Skeleton
from gesture_engine.motion_repr.rotations import rotation_to_quaternion
from gesture_engine.utilities.load_config import load_config

matplotlib.use("Agg")

TOY_CONFIG = """
motion: !MotionConfig
  fps: 20.0
  foot_joints: ["left_foot", "left_foot", "right_foot", "right_foot"]

audio: !AudioFeatureLayout
  mfcc: 4
  mel_spectrum: 8
  pitch: 2
  energy: 1
  onsets: 1
  external_embedding: 0

diffusion: !DiffusionConfig
  num_steps: 50
  num_frames: 24

denoiser: !DenoiserConfig
  feature_dim: 59
  audio_dim: 16
  text_dim: 32
  hidden_dim: 16
  num_layers: 1
  num_heads: 2
  max_len: 25

training: !TrainingConfig
  learning_rate: 0.001
  batch_size: 4
  num_steps: 5
  log_interval: 1

handshake: !HandshakeConfig
  handshake_size: 4
  blend_length: 2
  context_frames: 3
  refine_steps: 30

dataset: !DatasetConfig
  min_text_frames: 10
  max_text_frames: 40
  synthetic_entries_per_family: 3
  synthetic_audio_entries: 3
  synthetic_audio_frames: 30
"""


class OracleDenoiser:
    """Denoiser returning a fixed clean sample, a single row is repeated over all frames."""

    def __init__(self, target: np.ndarray):
        self.target = np.asarray(target, dtype=float)
        self.feature_dim = self.target.shape[-1]
        self.calls = 0

    def __call__(self, x_t: np.ndarray, t: int, bundle: ConditionBundle) -> np.ndarray:
        self.calls += 1
        if self.target.ndim == 1:
            return np.tile(self.target, (x_t.shape[0], 1))
        return self.target.copy()


class LinearDenoiser:
    """Denoiser affine in the iterate and in both condition modalities."""

    def __init__(self, feature_dim: int, audio_dim: int, text_dim: int, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.feature_dim = feature_dim
        self.audio_map = 0.1 * rng.standard_normal((audio_dim, feature_dim))
        self.text_map = 0.5 * rng.standard_normal((text_dim, feature_dim))

    def __call__(self, x_t: np.ndarray, t: int, bundle: ConditionBundle) -> np.ndarray:
        return 0.5 * x_t + bundle.audio_features @ self.audio_map + bundle.text_embedding @ self.text_map


@pytest.fixture
def random_quaternions():
    """Construct random unit quaternions (w, x, y, z) with non-negative scalar part using factory function.

    Arguments:
    size: int

    Returns
    -------
        Quaternion array with dimensions: [size, 4]
    """
    rng = np.random.default_rng(seed=0)

    def _random_quaternions(size: int):
        return rotation_to_quaternion(Rotation.random(size, random_state=rng), (size,))
    return _random_quaternions


@pytest.fixture
def test_skeleton():
    """Seven joint skeleton with heel and toe joints, rest height 1.7 m."""
    return Skeleton(
        (
            Joint("pelvis", None, (0.0, 0.0, 0.0)),
            Joint("left_heel", 0, (0.1, -0.9, 0.0)),
            Joint("left_foot", 1, (0.0, 0.0, 0.15), end_site=(0.0, 0.0, 0.05)),
            Joint("right_heel", 0, (-0.1, -0.9, 0.0)),
            Joint("right_foot", 3, (0.0, 0.0, 0.15), end_site=(0.0, 0.0, 0.05)),
            Joint("spine", 0, (0.0, 0.3, 0.0)),
            Joint("head", 5, (0.0, 0.5, 0.05), end_site=(0.0, 0.2, 0.0)),
        )
    )


@pytest.fixture
def random_clip(test_skeleton):
    """Construct smooth random motion on the test skeleton using factory function.

    Arguments:
    num_frames: int, fps: float

    Returns
    -------
        Motion clip with sinusoidal joint rotations and a root walking forward while turning
    """
    rng = np.random.default_rng(seed=0)

    def _random_clip(num_frames: int, fps: float = 20.0):
        num_joints = test_skeleton.num_joints
        time = np.arange(num_frames) / fps
        freq = rng.uniform(0.2, 1.0, size=(num_joints, 3))
        phase = rng.uniform(0, 2 * np.pi, size=(num_joints, 3))
        rotvec = 0.3 * np.sin(2 * np.pi * freq[None] * time[:, None, None] + phase[None])
        rotvec[:, 0, 1] += 0.4 * time
        rotations = rotation_to_quaternion(
            Rotation.from_rotvec(rotvec.reshape(-1, 3)), (num_frames, num_joints)
        )
        translation = np.stack(
            [0.2 * np.sin(time), 0.95 + 0.02 * np.sin(3 * time), 0.6 * time], axis=-1
        )
        return MotionClip(test_skeleton, fps, translation, rotations)
    return _random_clip


@pytest.fixture
def toy_config_file(tmp_path):
    """Write the toy engine configuration used by pipeline tests."""
    path = tmp_path / "toy_config.yaml"
    path.write_text(TOY_CONFIG, encoding="utf-8")
    return path


@pytest.fixture
def toy_config(toy_config_file):
    """Toy engine configuration: 5-joint synthetic skeleton, 24 frames, 50 noising steps."""
    return load_config(toy_config_file)


@pytest.fixture
def oracle_denoiser():
    """Construct oracle denoiser using factory function.

    Arguments:
    target: np.ndarray, clean sample (T, D) or a single frame (D,)
    """
    return OracleDenoiser


@pytest.fixture
def linear_denoiser():
    """Construct affine denoiser using factory function.

    Arguments:
    feature_dim: int, audio_dim: int, text_dim: int, seed: int
    """
    return LinearDenoiser


@pytest.fixture
def random_bundle():
    """Construct random condition bundles using factory function.

    Arguments:
    num_frames: int, audio_dim: int, text_dim: int, with_text: bool

    Returns
    -------
        Condition bundle with random audio features and, optionally, a random unit text embedding
    """
    rng = np.random.default_rng(seed=0)

    def _random_bundle(num_frames: int, audio_dim: int = 3, text_dim: int = 4, with_text: bool = True):
        text = None
        if with_text:
            text = rng.standard_normal(text_dim)
            text /= np.linalg.norm(text)
        audio = rng.standard_normal((num_frames, audio_dim))
        return ConditionBundle.create(num_frames, audio_dim, text, audio, text_dim=text_dim)
    return _random_bundle
