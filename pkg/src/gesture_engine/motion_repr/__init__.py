"""Motion representation: BVH input and output, rotations, forward kinematics and the feature codec."""
from gesture_engine.motion_repr.bvh import parse_bvh, write_bvh
from gesture_engine.motion_repr.canonicalize import canonicalize, remap_axes, resample_clip
from gesture_engine.motion_repr.features import decode_features, encode_features
from gesture_engine.motion_repr.kinematics import forward_kinematics
from gesture_engine.motion_repr.rotations import RotationForm, convert_rotation

__all__ = [
    "RotationForm",
    "canonicalize",
    "convert_rotation",
    "decode_features",
    "encode_features",
    "forward_kinematics",
    "parse_bvh",
    "remap_axes",
    "resample_clip",
    "write_bvh",
]
