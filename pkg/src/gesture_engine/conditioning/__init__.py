"""Condition bundle construction: text embedding, audio features and condition masking."""
from gesture_engine.conditioning.audio_features import align_audio_to_frames, extract_audio_features, read_wav
from gesture_engine.conditioning.masking import mask_conditions
from gesture_engine.conditioning.text_encoder import HashingTextEncoder, embed_text

__all__ = [
    "HashingTextEncoder",
    "align_audio_to_frames",
    "embed_text",
    "extract_audio_features",
    "mask_conditions",
    "read_wav",
]
