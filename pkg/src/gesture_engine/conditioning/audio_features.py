"""Frame-level speech features.

Frames are 25 ms Hann windows taken every 50 ms at 16 kHz, i.e. 20 feature frames per second.
"""
import logging
import os
from functools import lru_cache
from typing import Protocol

import librosa
import numpy as np
from scipy import fft, signal
from scipy.io import wavfile

from gesture_engine.interfaces.interface_condition_bundle import AudioFeatureLayout

log = logging.getLogger("Audio")

SAMPLE_RATE: int = 16_000
WINDOW_LENGTH: int = 400
HOP_LENGTH: int = 800
N_FFT: int = 512
LOG_FLOOR: float = 1e-10
PITCH_RANGE: tuple[float, float] = (50.0, 500.0)
VOICING_THRESHOLD: float = 0.5
PEAK_RATIO: float = 0.9


class SpeechEmbedder(Protocol):
    """Interface of a pretrained speech model filling the external embedding columns."""

    def __call__(self, pcm: np.ndarray, num_frames: int) -> np.ndarray:
        """Return frame-level embeddings, shape (num_frames, width)."""
        ...


def read_wav(path: str | os.PathLike) -> np.ndarray:
    """Read a 16-bit PCM mono 16 kHz RIFF file.

    Returns
    -------
        Samples scaled to [-1, 1)

    Raises
    ------
    ValueError
        File is not 16 kHz, mono and 16-bit PCM
    """
    rate, samples = wavfile.read(os.fspath(path))
    if rate != SAMPLE_RATE:
        raise ValueError(f"WAV file {path} has sample rate {rate} Hz, {SAMPLE_RATE} Hz required")
    if samples.ndim != 1:
        raise ValueError(f"WAV file {path} has {samples.shape[1]} channels, mono required")
    if samples.dtype != np.int16:
        raise ValueError(f"WAV file {path} has sample type {samples.dtype}, 16-bit PCM required")
    return samples.astype(float) / 32768.0


@lru_cache(maxsize=8)
def _mel_filterbank(num_bands: int) -> np.ndarray:
    return librosa.filters.mel(sr=SAMPLE_RATE, n_fft=N_FFT, n_mels=num_bands)


def _pitch(frames: np.ndarray) -> np.ndarray:
    """Fundamental frequency and voicing flag per frame by normalized autocorrelation."""
    centered = frames - frames.mean(axis=-1, keepdims=True)
    spectrum = np.fft.rfft(centered, n=2 * frames.shape[-1], axis=-1)
    autocorr = np.fft.irfft(np.abs(spectrum) ** 2, axis=-1)[:, : frames.shape[-1]]
    lag_min = int(np.ceil(SAMPLE_RATE / PITCH_RANGE[1]))
    lag_max = int(np.floor(SAMPLE_RATE / PITCH_RANGE[0]))

    out = np.zeros((frames.shape[0], 2))
    for k, r in enumerate(autocorr):
        if r[0] <= LOG_FLOOR:
            continue
        r = r / r[0]
        window = r[lag_min: lag_max + 1]
        threshold = PEAK_RATIO * window.max()
        lags = np.arange(lag_min, lag_max + 1)
        is_peak = (r[lags] >= r[lags - 1]) & (r[lags] >= r[lags + 1]) & (r[lags] >= threshold)
        if not is_peak.any():
            continue
        lag = int(lags[np.argmax(is_peak)])
        if r[lag] < VOICING_THRESHOLD:
            continue
        denominator = r[lag - 1] - 2 * r[lag] + r[lag + 1]
        shift = 0.5 * (r[lag - 1] - r[lag + 1]) / denominator if denominator < 0 else 0.0
        out[k] = (SAMPLE_RATE / (lag + shift), 1.0)
    return out


def extract_audio_features(
    pcm: np.ndarray,
    layout: AudioFeatureLayout | None = None,
    sample_rate: int = SAMPLE_RATE,
    embedder: SpeechEmbedder | None = None,
) -> np.ndarray:
    """Extract the frame-level audio feature matrix.

    Parameters
    ----------
    pcm
        Mono samples, float in [-1, 1] or int16
    layout, optional
        Column widths, by default ``AudioFeatureLayout()``
    sample_rate, optional
        Sample rate of ``pcm``, must be 16 kHz
    embedder, optional
        Speech model filling the external embedding columns, by default None (zero-filled)

    Returns
    -------
        Feature matrix with one row per 50 ms hop and ``layout.dim`` columns

    Raises
    ------
    ValueError
        Wrong sample rate, multi-channel input or fewer samples than one analysis window
    """
    layout = layout or AudioFeatureLayout()
    if sample_rate != SAMPLE_RATE:
        raise ValueError(f"Audio sample rate must be {SAMPLE_RATE} Hz, got {sample_rate}")
    pcm = np.asarray(pcm)
    if pcm.dtype == np.int16:
        pcm = pcm.astype(float) / 32768.0
    pcm = pcm.astype(float)
    if pcm.ndim != 1:
        raise ValueError(f"Audio must be mono, got shape {pcm.shape}")
    if pcm.size < WINDOW_LENGTH:
        raise ValueError(f"Audio requires at least {WINDOW_LENGTH} samples, got {pcm.size}")

    frames = librosa.util.frame(pcm, frame_length=WINDOW_LENGTH, hop_length=HOP_LENGTH, axis=0)
    num_frames = frames.shape[0]
    window = signal.get_window("hann", WINDOW_LENGTH)
    magnitude = np.abs(np.fft.rfft(frames * window, n=N_FFT, axis=-1))

    mel_power = magnitude**2 @ _mel_filterbank(layout.mel_spectrum).T
    log_mel = np.log(np.maximum(mel_power, LOG_FLOOR))
    mfcc = fft.dct(log_mel, type=2, norm="ortho", axis=-1)[:, : layout.mfcc]
    rms = np.sqrt(np.mean(frames**2, axis=-1))
    energy = np.log(np.maximum(rms, LOG_FLOOR))
    flux = np.zeros(num_frames)
    flux[1:] = np.maximum(np.diff(magnitude, axis=0), 0.0).sum(axis=-1)

    columns = {
        "mfcc": mfcc,
        "mel_spectrum": log_mel,
        "pitch": _pitch(frames),
        "energy": energy[:, None],
        "onsets": flux[:, None],
        "external_embedding": np.zeros((num_frames, layout.external_embedding)),
    }
    if embedder is not None and layout.external_embedding > 0:
        external = np.asarray(embedder(pcm, num_frames), dtype=float)
        if external.shape != (num_frames, layout.external_embedding):
            raise ValueError(f"Speech embedder returned shape {external.shape}, "
                             f"expected {(num_frames, layout.external_embedding)}")
        columns["external_embedding"] = external

    features = np.concatenate([columns[name] for name in layout.widths], axis=-1)
    log.debug("Extracted %d audio frames from %.2f s of audio", num_frames, pcm.size / SAMPLE_RATE)
    return features


def align_audio_to_frames(features: np.ndarray, num_frames: int) -> np.ndarray:
    """Linearly interpolate audio feature rows to the motion frame count.

    Output row ``t`` interpolates the input at position ``t (F_a - 1) / (T_M - 1)``, so the first and the
    last row are reproduced exactly.

    Parameters
    ----------
    features
        Audio features, shape (F_a, A) with F_a >= 1
    num_frames
        Motion frame count T_M

    Returns
    -------
        Aligned features, shape (T_M, A)
    """
    if num_frames < 1:
        raise ValueError(f"Target frame count must be >= 1, got {num_frames}")
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[0] < 1:
        raise ValueError(f"Audio features must be a (F_a >= 1, A) matrix, got {features.shape}")
    count = features.shape[0]
    if count == 1 or num_frames == 1:
        return np.repeat(features[:1], num_frames, axis=0)
    position = np.arange(num_frames) * (count - 1) / (num_frames - 1)
    lower = np.minimum(np.floor(position).astype(int), count - 2)
    weight = (position - lower)[:, None]
    return (1.0 - weight) * features[lower] + weight * features[lower + 1]
