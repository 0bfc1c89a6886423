"""Training loop of the denoiser."""
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import torch

from gesture_engine.conditioning.masking import mask_text_batch
from gesture_engine.dataset.padding import prepare_window
from gesture_engine.dataset.sampling import weighted_sampler
from gesture_engine.denoiser.gradients import TrainingBatch, batch_loss
from gesture_engine.denoiser.model import GestureDenoiser
from gesture_engine.diffusion.process import q_sample
from gesture_engine.diffusion.schedule import NoiseSchedule
from gesture_engine.errors import TrainingDivergedError
from gesture_engine.interfaces.interface_dataset_entry import DatasetEntry
from gesture_engine.interfaces.interface_engine_parameter import TrainingConfig

log = logging.getLogger("Trainer")


@dataclass
class TrainingResult:
    """Outcome of a training run."""

    loss_curve: list[float] = field(default_factory=list)
    """Loss of every optimizer step."""

    sources: list[str] = field(default_factory=list)
    """Source tags in sampling order."""

    weights: list[float] = field(default_factory=list)
    """Sampling weight per source."""


class BatchSampler:
    """Draws noised training batches from several weighted sources."""

    def __init__(
        self,
        sources: Mapping[str, Sequence[DatasetEntry]],
        weights: Mapping[str, float] | None,
        num_frames: int,
        schedule: NoiseSchedule,
        rng: np.random.Generator,
    ):
        """Construct batch sampler.

        Parameters
        ----------
        sources
            Normalized entries per source tag
        weights
            Sampling weight per source tag, missing tags get weight 1 (equal expected draws)
        num_frames
            Window length T_M
        schedule
            Noise schedule
        rng
            Seeded generator shared by all random draws
        """
        self.tags = sorted(tag for tag, entries in sources.items() if len(entries) > 0)
        if not self.tags:
            raise ValueError("Training requires at least one non-empty source")
        self.sources = [list(sources[tag]) for tag in self.tags]
        self.weights = [float((weights or {}).get(tag, 1.0)) for tag in self.tags]
        self.num_frames = num_frames
        self.schedule = schedule
        self.rng = rng
        self._stream = weighted_sampler([len(s) for s in self.sources], self.weights, rng)

    def draw(self, batch_size: int, mask_probability: float) -> TrainingBatch:
        """Sample entries, windows, steps and noise, and mask text conditions."""
        chosen = [self.sources[k][index] for k, index in (next(self._stream) for _ in range(batch_size))]
        windows = [prepare_window(entry, self.num_frames, self.rng) for entry in chosen]
        x0 = np.stack([window[0] for window in windows])
        audio = np.stack([window[1] for window in windows])
        valid = np.stack([window[2] for window in windows])
        text, _ = mask_text_batch(np.stack([e.bundle.text_embedding for e in chosen]), self.rng, mask_probability)
        steps = self.rng.integers(1, self.schedule.num_steps + 1, size=batch_size)
        noise = self.rng.standard_normal(x0.shape)
        x_t = q_sample(x0, steps, noise, self.schedule)
        return TrainingBatch(x0=x0, x_t=x_t, steps=steps, text=text, audio=audio, valid=valid)


def train(
    model: GestureDenoiser,
    sources: Mapping[str, Sequence[DatasetEntry]],
    config: TrainingConfig,
    schedule: NoiseSchedule,
    num_frames: int,
    rng: np.random.Generator,
    weights: Mapping[str, float] | None = None,
) -> TrainingResult:
    """Train the denoiser in place with Adam.

    Every step draws a weighted batch, a uniform step t in [1, T] per sample, noises the clean windows,
    masks text conditions and minimizes the training loss between prediction and clean sample.

    Parameters
    ----------
    model
        Denoiser network, updated in place
    sources
        Normalized dataset entries per source tag
    config
        Optimizer and loop parameters
    schedule
        Noise schedule
    num_frames
        Window length T_M
    rng
        Seeded generator, identical seeds give identical loss curves
    weights, optional
        Sampling weight per source tag, by default equal expected draws

    Returns
    -------
        Loss curve and sampling summary

    Raises
    ------
    TrainingDivergedError
        Loss became non-finite, the error carries the loss curve so far
    """
    sampler = BatchSampler(sources, weights, num_frames, schedule, rng)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate, betas=config.betas)
    result = TrainingResult(sources=sampler.tags, weights=sampler.weights)
    log.info("Training %d steps on sources %s with weights %s", config.num_steps, sampler.tags, sampler.weights)
    model.train()
    for step in range(1, config.num_steps + 1):
        batch = sampler.draw(config.batch_size, config.mask_probability)
        optimizer.zero_grad(set_to_none=True)
        loss = batch_loss(model, batch, config.loss_kind, config.huber_delta)
        value = float(loss.item())
        result.loss_curve.append(value)
        try:
            if not np.isfinite(value):
                raise TrainingDivergedError(step, list(result.loss_curve))
        except TrainingDivergedError as err:
            log.exception(err, exc_info=True)
            raise err
        loss.backward()
        optimizer.step()
        if step % config.log_interval == 0 or step == config.num_steps:
            log.info("Step %d / %d: loss %.6f", step, config.num_steps, value)
    model.eval()
    return result
