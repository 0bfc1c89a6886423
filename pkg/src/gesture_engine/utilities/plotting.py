"""Diagnostic figures."""
import matplotlib
import matplotlib.pyplot as plt
import numpy as np


def plot_transition_masks(
    hard: np.ndarray, soft: np.ndarray, handshake: tuple[int, int] | None = None
) -> tuple[matplotlib.figure.Figure, matplotlib.axes.Axes]:
    """Plot hard mask, soft mask and their product over the frames of a transition sandwich.

    Parameters
    ----------
    hard
        Hard mask per frame
    soft
        Soft mask per frame
    handshake, optional
        First and last handshake frame, shaded if given

    Returns
    -------
        Matplotlib figure and axis
    """
    fig, axis = plt.subplots(1, 1, figsize=(10, 4))
    frames = np.arange(hard.size)
    axis.plot(frames, hard, label="Hard mask", drawstyle="steps-mid")
    axis.plot(frames, soft, label="Soft mask")
    axis.plot(frames, hard * soft, label="Product", linewidth=2)
    if handshake is not None:
        axis.axvspan(handshake[0], handshake[1], color="gray", alpha=0.2, label="Handshake")
    axis.set_xlabel("Sandwich frame")
    axis.set_ylabel("Mask value")
    axis.set_ylim(-0.05, 1.05)
    axis.legend(loc="upper right")
    axis.grid(axis="y")
    return fig, axis


def plot_loss_curve(
    losses: np.ndarray | list[float], window: int = 50
) -> tuple[matplotlib.figure.Figure, matplotlib.axes.Axes]:
    """Plot the per-step training loss with a moving average.

    Parameters
    ----------
    losses
        Loss per training step
    window, optional
        Moving average length in steps, by default 50

    Returns
    -------
        Matplotlib figure and axis
    """
    losses = np.asarray(losses, dtype=float)
    fig, axis = plt.subplots(1, 1, figsize=(10, 4))
    steps = np.arange(1, losses.size + 1)
    axis.plot(steps, losses, alpha=0.4, label="Loss")
    if losses.size >= window > 1:
        average = np.convolve(losses, np.ones(window) / window, mode="valid")
        axis.plot(steps[window - 1:], average, label=f"Moving average ({window})")
    axis.set_xlabel("Step")
    axis.set_ylabel("Loss")
    axis.set_yscale("log")
    axis.legend(loc="upper right")
    return fig, axis
