"""Forward process, posterior step and training loss."""
import numpy as np
import torch
import torch.nn.functional as F  # noqa: N812

from gesture_engine.diffusion.schedule import NoiseSchedule
from gesture_engine.interfaces.interface_engine_parameter import LossKind

DEGENERATE_VARIANCE: float = 1e-12


def _broadcast(values: np.ndarray, ndim: int) -> np.ndarray:
    """Reshape per-sample coefficients (B,) to broadcast over (B, ...)."""
    return values.reshape(values.shape + (1,) * (ndim - values.ndim))


def q_sample(x0: np.ndarray, t: int | np.ndarray, noise: np.ndarray, schedule: NoiseSchedule) -> np.ndarray:
    """Sample x_t ~ q(x_t | x_0) in closed form.

    Parameters
    ----------
    x0
        Clean samples, a single (T_M, D) matrix or a batch (B, T_M, D)
    t
        Step index, scalar or one index per batch entry
    noise
        Standard normal noise of the shape of ``x0``
    schedule
        Noise schedule

    Returns
    -------
        sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) noise
    """
    if noise.shape != x0.shape:
        raise ValueError(f"Noise shape {noise.shape} does not match sample shape {x0.shape}")
    steps = np.asarray(t, dtype=int)
    if np.any(steps < 0) or np.any(steps > schedule.num_steps):
        raise ValueError(f"Step index outside of [0, {schedule.num_steps}]")
    alpha_bar = _broadcast(schedule.alpha_bar[steps], x0.ndim)
    return np.sqrt(alpha_bar) * x0 + np.sqrt(1.0 - alpha_bar) * noise


def q_step(x_prev: np.ndarray, t: int, noise: np.ndarray, schedule: NoiseSchedule) -> np.ndarray:
    """Apply a single noising step x_t ~ N(sqrt(alpha_t) x_{t-1}, (1 - alpha_t) I)."""
    if not 1 <= t <= schedule.num_steps:
        raise ValueError(f"Noising step requires 1 <= t <= {schedule.num_steps}, got {t}")
    return np.sqrt(schedule.alpha[t]) * x_prev + np.sqrt(1.0 - schedule.alpha[t]) * noise


def posterior_coefficients(t: int, schedule: NoiseSchedule) -> tuple[float, float, float]:
    """Return the posterior mean coefficients of x0_hat and x_t and the posterior variance at step t."""
    denominator = 1.0 - schedule.alpha_bar[t]
    if denominator < DEGENERATE_VARIANCE:
        # Noise-free step, the prediction is exact
        return 1.0, 0.0, 0.0
    coef_x0 = np.sqrt(schedule.alpha_bar[t - 1]) * schedule.beta[t] / denominator
    coef_xt = np.sqrt(schedule.alpha[t]) * (1.0 - schedule.alpha_bar[t - 1]) / denominator
    variance = 0.0 if t == 1 else float(schedule.posterior_variance[t])
    return float(coef_x0), float(coef_xt), variance


def posterior_step(
    x0_hat: np.ndarray, x_t: np.ndarray, t: int, schedule: NoiseSchedule, noise: np.ndarray | None = None
) -> np.ndarray:
    """Sample x_{t-1} from the posterior q(x_{t-1} | x_t, x0_hat).

    The final step t = 1 returns the posterior mean, ``noise`` may be None there.

    Raises
    ------
    ValueError
        t = 0 or shape mismatch
    """
    if not 1 <= t <= schedule.num_steps:
        raise ValueError(f"Posterior step requires 1 <= t <= {schedule.num_steps}, got {t}")
    if x0_hat.shape != x_t.shape:
        raise ValueError(f"Prediction shape {x0_hat.shape} does not match iterate shape {x_t.shape}")
    coef_x0, coef_xt, variance = posterior_coefficients(t, schedule)
    mean = coef_x0 * x0_hat + coef_xt * x_t
    if variance == 0.0:
        return mean
    if noise is None:
        raise ValueError(f"Posterior step {t} requires noise")
    return mean + np.sqrt(variance) * noise


def training_loss(
    x0: np.ndarray | torch.Tensor,
    x0_hat: np.ndarray | torch.Tensor,
    loss_kind: LossKind | str = LossKind.HUBER,
    delta: float = 1.0,
    valid: np.ndarray | torch.Tensor | None = None,
) -> float | torch.Tensor:
    """Mean reconstruction loss between x0 and its prediction.

    Parameters
    ----------
    x0
        Target samples, numpy array or torch tensor
    x0_hat
        Predictions with the shape of ``x0``
    loss_kind, optional
        Huber loss or mean squared error, by default Huber
    delta, optional
        Huber transition point, by default 1.0
    valid, optional
        Frame validity mask broadcasting against the leading axes of ``x0`` (e.g. (B, T_M)),
        padded frames are excluded from the mean, by default None (all entries)

    Returns
    -------
        Scalar loss, a float for numpy input and a differentiable tensor for torch input
    """
    loss_kind = LossKind(loss_kind)
    if tuple(x0.shape) != tuple(x0_hat.shape):
        raise ValueError(f"Loss inputs differ in shape: {tuple(x0.shape)} vs {tuple(x0_hat.shape)}")

    if isinstance(x0_hat, torch.Tensor):
        target = torch.as_tensor(x0, dtype=x0_hat.dtype)
        if loss_kind == LossKind.HUBER:
            entries = F.huber_loss(x0_hat, target, reduction="none", delta=delta)
        else:
            entries = F.mse_loss(x0_hat, target, reduction="none")
        if valid is None:
            return entries.mean()
        weight = torch.as_tensor(valid, dtype=entries.dtype)
        weight = weight.reshape(tuple(weight.shape) + (1,) * (entries.ndim - weight.ndim))
        return (entries * weight).sum() / (weight.expand_as(entries).sum()).clamp_min(1.0)

    error = np.asarray(x0_hat, dtype=float) - np.asarray(x0, dtype=float)
    if loss_kind == LossKind.HUBER:
        magnitude = np.abs(error)
        entries = np.where(magnitude <= delta, 0.5 * error**2, delta * (magnitude - 0.5 * delta))
    else:
        entries = error**2
    if valid is None:
        return float(entries.mean())
    weight = np.asarray(valid, dtype=float)
    weight = np.broadcast_to(weight.reshape(weight.shape + (1,) * (entries.ndim - weight.ndim)), entries.shape)
    return float((entries * weight).sum() / max(weight.sum(), 1.0))
