"""Diffusion process: noise schedule, forward sampling, loss and guided reverse process."""
from gesture_engine.diffusion.process import posterior_step, q_sample, training_loss
from gesture_engine.diffusion.sampler import Denoiser, cfg_denoise, sample_loop
from gesture_engine.diffusion.schedule import NoiseSchedule, cosine_schedule

__all__ = [
    "Denoiser",
    "NoiseSchedule",
    "cfg_denoise",
    "cosine_schedule",
    "posterior_step",
    "q_sample",
    "sample_loop",
    "training_loss",
]
