"""Long motion composition from independently generated clips."""
from gesture_engine.doubletake.composition import (
    Composition,
    PromptScript,
    Segment,
    SegmentCondition,
    compose_long,
    segment_conditions,
)
from gesture_engine.doubletake.handshake import blend_handshake, boundary_discontinuity, unfold
from gesture_engine.doubletake.masks import build_transition_masks, transition_window
from gesture_engine.doubletake.refinement import refine_sandwich

__all__ = [
    "Composition",
    "PromptScript",
    "Segment",
    "SegmentCondition",
    "blend_handshake",
    "boundary_discontinuity",
    "build_transition_masks",
    "compose_long",
    "refine_sandwich",
    "segment_conditions",
    "transition_window",
    "unfold",
]
