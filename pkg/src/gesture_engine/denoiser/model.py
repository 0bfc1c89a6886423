"""Self-attention denoiser predicting the clean motion sample.

Token 0 carries the text embedding together with the step embedding, tokens 1 .. T_M carry one motion frame
each together with the audio features of that frame.
"""
import logging
import math

import numpy as np
import torch
from torch import nn

from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_engine_parameter import DenoiserConfig

log = logging.getLogger("Denoiser")

MAX_PERIOD: float = 10_000.0


def sinusoidal_embedding(positions: torch.Tensor, dim: int) -> torch.Tensor:
    """Sinusoidal embedding ``[sin(p w_k), cos(p w_k)]`` with geometric frequencies w_k.

    Parameters
    ----------
    positions
        Step indices or token positions, shape (N,)
    dim
        Even embedding dimension

    Returns
    -------
        Embedding, shape (N, dim)
    """
    half = dim // 2
    freqs = torch.exp(-math.log(MAX_PERIOD) * torch.arange(half, dtype=torch.float64) / half)
    args = positions.to(torch.float64)[:, None] * freqs[None]
    return torch.cat([torch.sin(args), torch.cos(args)], dim=-1)


class GestureDenoiser(nn.Module):
    """Denoising network D(x_t, t, c)."""

    def __init__(self, config: DenoiserConfig, seed: int = 0):
        """Construct the network with seeded initialization.

        Parameters
        ----------
        config
            Architecture parameters
        seed, optional
            Seed of the parameter initialization, by default 0
        """
        super().__init__()
        self.config = config
        hidden = config.hidden_dim
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            self.step_mlp = nn.Sequential(nn.Linear(hidden, hidden), nn.SiLU(), nn.Linear(hidden, hidden))
            self.condition_proj = nn.Linear(config.text_dim + hidden, hidden)
            self.frame_proj = nn.Linear(config.feature_dim + config.audio_dim, hidden)
            layer = nn.TransformerEncoderLayer(
                d_model=hidden,
                nhead=config.num_heads,
                dim_feedforward=config.ff_multiplier * hidden,
                dropout=0.0,
                activation="gelu",
                batch_first=True,
            )
            self.encoder = nn.TransformerEncoder(layer, num_layers=config.num_layers, enable_nested_tensor=False)
            self.head = nn.Linear(hidden, config.feature_dim)
        if config.zero_init_head:
            nn.init.zeros_(self.head.weight)
            nn.init.zeros_(self.head.bias)
        self.to(self.dtype)

    @property
    def dtype(self) -> torch.dtype:
        """Parameter precision."""
        return torch.float64 if self.config.dtype == "float64" else torch.float32

    def timestep_embedding(self, steps: torch.Tensor) -> torch.Tensor:
        """Learned projection of the sinusoidal step embedding, shape (B, hidden_dim)."""
        return self.step_mlp(sinusoidal_embedding(steps, self.config.hidden_dim).to(self.dtype))

    def forward(self, x_t: torch.Tensor, steps: torch.Tensor, text: torch.Tensor, audio: torch.Tensor) -> torch.Tensor:
        """Predict the clean sample.

        Parameters
        ----------
        x_t
            Noisy motion, shape (B, T_M, D)
        steps
            Noising step per batch entry, shape (B,)
        text
            Text embeddings, zero for the empty condition, shape (B, text_dim)
        audio
            Frame-aligned audio features, shape (B, T_M, A)

        Returns
        -------
            Predicted clean motion, shape (B, T_M, D)
        """
        batch, num_frames, feature_dim = x_t.shape
        if feature_dim != self.config.feature_dim:
            raise ValueError(f"Motion feature dimension {feature_dim} differs from {self.config.feature_dim}")
        if tuple(audio.shape) != (batch, num_frames, self.config.audio_dim):
            expected = (batch, num_frames, self.config.audio_dim)
            raise ValueError(f"Audio shape {tuple(audio.shape)} does not match {expected}")
        if tuple(text.shape) != (batch, self.config.text_dim):
            raise ValueError(f"Text shape {tuple(text.shape)} does not match {(batch, self.config.text_dim)}")
        if tuple(steps.shape) != (batch,):
            raise ValueError(f"Expected one step per batch entry, got shape {tuple(steps.shape)}")
        if num_frames + 1 > self.config.max_len:
            raise ValueError(f"{num_frames} frames plus condition token exceed max_len {self.config.max_len}")

        condition = self.condition_proj(torch.cat([text, self.timestep_embedding(steps)], dim=-1))
        frames = self.frame_proj(torch.cat([x_t, audio], dim=-1))
        tokens = torch.cat([condition[:, None], frames], dim=1)
        if self.config.use_positional_encoding:
            positions = torch.arange(num_frames + 1)
            tokens = tokens + sinusoidal_embedding(positions, self.config.hidden_dim).to(self.dtype)[None]
        encoded = self.encoder(tokens)
        return self.head(encoded[:, 1:])


class NetworkDenoiser:
    """Numpy adapter of a ``GestureDenoiser`` for the sampling loops.

    Parameters are only read, every call runs without gradient tracking.
    """

    def __init__(self, model: GestureDenoiser):
        """Wrap a network, switching it to evaluation mode."""
        self.model = model.eval()
        self.feature_dim = model.config.feature_dim

    def __call__(self, x_t: np.ndarray, t: int, bundle: ConditionBundle) -> np.ndarray:
        """Return x0_hat for a single (T_M, D) iterate."""
        dtype = self.model.dtype
        with torch.no_grad():
            prediction = self.model(
                torch.as_tensor(x_t, dtype=dtype)[None],
                torch.tensor([t], dtype=torch.long),
                torch.as_tensor(bundle.text_embedding, dtype=dtype)[None],
                torch.as_tensor(bundle.audio_features, dtype=dtype)[None],
            )
        return prediction[0].to(torch.float64).numpy()


def parameter_arrays(model: nn.Module) -> dict[str, np.ndarray]:
    """Return all parameters and buffers as numpy arrays keyed by their state-dict names."""
    return {name: tensor.detach().cpu().numpy().copy() for name, tensor in model.state_dict().items()}


def load_parameter_arrays(model: nn.Module, arrays: dict[str, np.ndarray]) -> None:
    """Load numpy arrays produced by :func:`parameter_arrays` into ``model``."""
    state = {name: torch.from_numpy(np.asarray(value)) for name, value in arrays.items()}
    model.load_state_dict(state, strict=True)
