"""Objective evaluation metrics."""
from gesture_engine.metrics.frechet import GaussianFit, frechet_distance
from gesture_engine.metrics.kinematic import KinematicStats, kinematic_stats
from gesture_engine.metrics.report import EvaluationReport, evaluate
from gesture_engine.metrics.ssim import ssim

__all__ = [
    "EvaluationReport",
    "GaussianFit",
    "KinematicStats",
    "evaluate",
    "frechet_distance",
    "kinematic_stats",
    "ssim",
]
