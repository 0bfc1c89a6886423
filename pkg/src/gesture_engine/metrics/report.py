"""Evaluation of generated motion against a reference set."""
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from gesture_engine.dataset.normalization import fit_norm_stats
from gesture_engine.interfaces.interface_engine_parameter import MotionConfig
from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.metrics.frechet import GaussianFit, frechet_distance
from gesture_engine.metrics.kinematic import ACCELERATION, JERK, kinematic_stats
from gesture_engine.metrics.ssim import BORDER, K1, K2, SIGMA, ssim
from gesture_engine.motion_repr.features import encode_features

log = logging.getLogger("Metrics")

CONVENTIONS: dict[str, str] = {
    "fid_feature_space": (
        "Gaussian fits over pooled kinematic feature frames normalized with the reference set statistics; "
        "values are only comparable between runs using the same reference set"
    ),
    "ssim": (
        f"motion matrix (frames x features) as a single-channel image, Gaussian window sigma {SIGMA}, 11 x 11, "
        f"K1 {K1}, K2 {K2}, dynamic range max - min over both inputs, {BORDER}-frame border excluded; "
        "generated and reference clips paired in sorted name order and cropped to the shorter length"
    ),
    "kinematics": (
        "mean absolute central difference of joint positions from forward kinematics "
        "over frames, joints and axes, per clip"
    ),
    "aggregation": "mean ± std across clips (population std)",
}


def mean_std(values: np.ndarray) -> str:
    """Format values as ``"mean ± std"``."""
    return f"{np.mean(values):.2f} ± {np.std(values):.2f}"


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """Metric values of an evaluation run."""

    metrics: dict[str, Any]
    """Formatted and raw metric values."""

    clips: pd.DataFrame
    """Per-clip kinematic table."""

    inputs: dict[str, dict[str, str]] = field(default_factory=dict)
    """SHA-256 digest of every input file per set."""

    def dict(self) -> dict[str, Any]:
        """Return the JSON document of the report."""
        return {"metrics": self.metrics, "conventions": CONVENTIONS, "inputs": self.inputs}


def evaluate(
    generated: Mapping[str, MotionClip],
    reference: Mapping[str, MotionClip],
    config: MotionConfig,
    inputs: dict[str, dict[str, str]] | None = None,
) -> EvaluationReport:
    """Compare generated clips with reference clips.

    Parameters
    ----------
    generated
        Canonical generated clips keyed by name, at the configured frame rate
    reference
        Canonical reference clips keyed by name, at least two
    config
        Motion configuration used for feature encoding
    inputs, optional
        Input file digests echoed into the report, by default None

    Returns
    -------
        Evaluation report with jerk, acceleration, Frechet distance and SSIM
    """
    if not generated or len(reference) < 2:
        raise ValueError(
            f"Evaluation requires generated clips and at least 2 reference clips, got {len(generated)} and "
            f"{len(reference)}"
        )
    sets = {"generated": dict(sorted(generated.items())), "reference": dict(sorted(reference.items()))}
    metrics: dict[str, Any] = {}
    rows = []
    for set_name, clips in sets.items():
        names, values = list(clips), list(clips.values())
        jerk = kinematic_stats(values, JERK, names)
        acceleration = kinematic_stats(values, ACCELERATION, names)
        metrics[set_name] = {
            "jerk": mean_std(jerk.per_clip),
            "acceleration": mean_std(acceleration.per_clip),
            "jerk_mean": jerk.mean,
            "jerk_std": jerk.std,
            "acceleration_mean": acceleration.mean,
            "acceleration_std": acceleration.std,
        }
        rows.extend(
            {"set": set_name, "name": name, "frames": clip.num_frames, "jerk": j, "acceleration": a}
            for name, clip, j, a in zip(names, values, jerk.per_clip, acceleration.per_clip)
        )

    features = {
        set_name: [encode_features(clip.skeleton, clip, config).data for clip in clips.values()]
        for set_name, clips in sets.items()
    }
    if features["generated"][0].shape[1] != features["reference"][0].shape[1]:
        raise ValueError("Generated and reference clips differ in feature dimension")
    norm = fit_norm_stats(features["reference"])
    normalized = {key: [norm.apply(f) for f in matrices] for key, matrices in features.items()}
    fits = {key: GaussianFit.from_samples(np.concatenate(matrices)) for key, matrices in normalized.items()}
    metrics["fid"] = frechet_distance(fits["generated"], fits["reference"])

    scores = []
    for gen, ref in zip(normalized["generated"], normalized["reference"]):
        length = min(gen.shape[0], ref.shape[0])
        scores.append(ssim(gen[:length], ref[:length]))
    metrics["ssim"] = mean_std(np.asarray(scores))
    metrics["ssim_mean"] = float(np.mean(scores))
    metrics["ssim_std"] = float(np.std(scores))
    log.info("FID %.4f, SSIM %s over %d pairs", metrics["fid"], metrics["ssim"], len(scores))
    return EvaluationReport(metrics=metrics, clips=pd.DataFrame(rows), inputs=inputs or {})
