"""Loss and exact parameter gradients of the denoiser."""
from dataclasses import dataclass

import numpy as np
import torch

from gesture_engine.denoiser.model import GestureDenoiser
from gesture_engine.diffusion.process import training_loss
from gesture_engine.interfaces.interface_engine_parameter import LossKind


@dataclass(frozen=True, eq=False)
class TrainingBatch:
    """Batch of noised training samples."""

    x0: np.ndarray
    """Clean (normalized) motion, shape (B, T_M, D)."""

    x_t: np.ndarray
    """Noised motion at the sampled steps, shape (B, T_M, D)."""

    steps: np.ndarray
    """Noising step per sample, shape (B,)."""

    text: np.ndarray
    """Text embeddings after condition masking, shape (B, text_dim)."""

    audio: np.ndarray
    """Frame-aligned audio features, shape (B, T_M, A)."""

    valid: np.ndarray | None = None
    """Frame validity mask, shape (B, T_M), None if every frame is valid."""

    @property
    def size(self) -> int:
        """Number of samples B."""
        return int(self.x0.shape[0])


def batch_loss(
    model: GestureDenoiser, batch: TrainingBatch, loss_kind: LossKind | str = LossKind.HUBER, delta: float = 1.0
) -> torch.Tensor:
    """Differentiable mean training loss of the denoiser predictions over a batch."""
    dtype = model.dtype
    prediction = model(
        torch.as_tensor(batch.x_t, dtype=dtype),
        torch.as_tensor(batch.steps, dtype=torch.long),
        torch.as_tensor(batch.text, dtype=dtype),
        torch.as_tensor(batch.audio, dtype=dtype),
    )
    valid = None if batch.valid is None else torch.as_tensor(batch.valid, dtype=dtype)
    return training_loss(torch.as_tensor(batch.x0, dtype=dtype), prediction, loss_kind, delta, valid)


def compute_gradients(
    model: GestureDenoiser, batch: TrainingBatch, loss_kind: LossKind | str = LossKind.HUBER, delta: float = 1.0
) -> tuple[float, dict[str, np.ndarray]]:
    """Compute the loss and its gradient with respect to every parameter by reverse-mode differentiation.

    Parameters
    ----------
    model
        Denoiser network
    batch
        Noised batch
    loss_kind, optional
        Training loss, by default Huber
    delta, optional
        Huber transition point, by default 1.0

    Returns
    -------
        Loss value and gradients keyed by parameter name

    Raises
    ------
    FloatingPointError
        Loss is not finite
    """
    names, parameters = zip(*model.named_parameters())
    loss = batch_loss(model, batch, loss_kind, delta)
    if not torch.isfinite(loss):
        raise FloatingPointError(f"Non-finite training loss {loss.item()}")
    grads = torch.autograd.grad(loss, parameters, allow_unused=True)
    return float(loss.item()), {
        name: np.zeros(tuple(param.shape)) if grad is None else grad.detach().to(torch.float64).numpy()
        for name, param, grad in zip(names, parameters, grads)
    }
