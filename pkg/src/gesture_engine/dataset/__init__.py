"""Dataset assembly: normalization, fixed-length windows, weighted sampling and the synthetic corpus."""
from gesture_engine.dataset.normalization import NormStats, fit_norm_stats
from gesture_engine.dataset.padding import pad_or_crop
from gesture_engine.dataset.sampling import weighted_sampler
from gesture_engine.dataset.synthetic import make_synthetic_corpus

__all__ = ["NormStats", "fit_norm_stats", "make_synthetic_corpus", "pad_or_crop", "weighted_sampler"]
