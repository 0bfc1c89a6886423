"""Denoising network, gradients, training loop and checkpoints."""
from gesture_engine.denoiser.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from gesture_engine.denoiser.gradients import TrainingBatch, compute_gradients
from gesture_engine.denoiser.model import GestureDenoiser, NetworkDenoiser, sinusoidal_embedding
from gesture_engine.denoiser.training import TrainingResult, train

__all__ = [
    "Checkpoint",
    "GestureDenoiser",
    "NetworkDenoiser",
    "TrainingBatch",
    "TrainingResult",
    "compute_gradients",
    "load_checkpoint",
    "save_checkpoint",
    "sinusoidal_embedding",
    "train",
]
