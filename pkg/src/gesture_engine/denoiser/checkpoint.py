"""Checkpoint container.

Layout, little-endian::

    magic            4 bytes  b"FTKC"
    version          u32      1
    manifest length  u64
    manifest         UTF-8 JSON (configuration, skeleton, tensor table, training metadata)
    tensors          concatenated tensor file blobs, offsets relative to the first blob

The manifest holds no timestamps, identical training runs produce identical files.
"""
import json
import os
import struct
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from gesture_engine.dataset.normalization import NormStats
from gesture_engine.denoiser.model import GestureDenoiser, load_parameter_arrays, parameter_arrays
from gesture_engine.errors import TensorFileError
from gesture_engine.interfaces.interface_engine_parameter import EngineConfig
from gesture_engine.interfaces.interface_skeleton import Skeleton
from gesture_engine.utilities.json_encoder import dumps
from gesture_engine.utilities.load_config import config_digest, config_from_dict
from gesture_engine.utilities.tensor_file import decode_tensor, encode_tensor

MAGIC: bytes = b"FTKC"
VERSION: int = 1
_HEADER = struct.Struct("<4sIQ")
_NORM_MEAN = "norm.mean"
_NORM_STD = "norm.std"


@dataclass(frozen=True, eq=False)
class Checkpoint:
    """Trained model with everything required to sample from it."""

    config: EngineConfig
    """Effective engine configuration of the training run."""

    skeleton: Skeleton
    """Canonical skeleton the features were encoded on."""

    norm_stats: NormStats
    """Feature normalization of the training split."""

    parameters: dict[str, np.ndarray]
    """Network state keyed by state-dict name."""

    metadata: dict[str, Any] = field(default_factory=dict)
    """Seed, data digest and training summary."""

    def build_model(self, seed: int = 0) -> GestureDenoiser:
        """Construct the network and load the stored parameters."""
        model = GestureDenoiser(self.config.denoiser, seed=seed)
        load_parameter_arrays(model, self.parameters)
        return model.eval()

    @classmethod
    def from_model(
        cls, model: GestureDenoiser, config: EngineConfig, skeleton: Skeleton, norm_stats: NormStats, **metadata
    ) -> "Checkpoint":
        """Capture the current state of a network."""
        return cls(config, skeleton, norm_stats, parameter_arrays(model), dict(metadata))


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    """Serialize a checkpoint, tensors are ordered by name."""
    tensors = dict(sorted(checkpoint.parameters.items()))
    tensors[_NORM_MEAN] = checkpoint.norm_stats.mean
    tensors[_NORM_STD] = checkpoint.norm_stats.std
    blobs, table, offset = [], {}, 0
    for name, array in tensors.items():
        blob = encode_tensor(np.asarray(array))
        table[name] = {"offset": offset, "length": len(blob)}
        blobs.append(blob)
        offset += len(blob)
    manifest = {
        "config": checkpoint.config.dict(),
        "config_digest": config_digest(checkpoint.config),
        "skeleton": checkpoint.skeleton.dict(),
        "norm_stats": {"mean": _NORM_MEAN, "std": _NORM_STD},
        "tensors": table,
        "metadata": checkpoint.metadata,
    }
    encoded = dumps(manifest).encode("utf-8")
    return _HEADER.pack(MAGIC, VERSION, len(encoded)) + encoded + b"".join(blobs)


def decode_checkpoint(data: bytes) -> Checkpoint:
    """Deserialize a checkpoint.

    Raises
    ------
    TensorFileError
        Bad magic, unsupported version, truncated manifest or tensor table mismatch
    """
    if len(data) < _HEADER.size:
        raise TensorFileError("Checkpoint header is truncated")
    magic, version, length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise TensorFileError(f"Invalid checkpoint magic {magic!r}")
    if version != VERSION:
        raise TensorFileError(f"Unsupported checkpoint version {version}")
    start = _HEADER.size + length
    if len(data) < start:
        raise TensorFileError("Checkpoint manifest is truncated")
    try:
        manifest = json.loads(data[_HEADER.size: start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TensorFileError(f"Invalid checkpoint manifest: {exc}") from exc

    tensors = {}
    for name, entry in manifest["tensors"].items():
        array, end = decode_tensor(data, start + entry["offset"])
        if end - start - entry["offset"] != entry["length"]:
            raise TensorFileError(f"Tensor {name} length does not match the checkpoint table")
        tensors[name] = array
    norm = manifest["norm_stats"]
    norm_stats = NormStats(mean=tensors.pop(norm["mean"]), std=tensors.pop(norm["std"]))
    config = config_from_dict(manifest["config"])
    if config_digest(config) != manifest["config_digest"]:
        raise TensorFileError("Checkpoint configuration does not match its digest")
    return Checkpoint(config, Skeleton.from_dict(manifest["skeleton"]), norm_stats, tensors, manifest["metadata"])


def save_checkpoint(path: str | os.PathLike, checkpoint: Checkpoint) -> None:
    """Write a checkpoint file."""
    with open(path, "wb") as file:
        file.write(encode_checkpoint(checkpoint))


def load_checkpoint(path: str | os.PathLike) -> Checkpoint:
    """Read a checkpoint file."""
    with open(path, "rb") as file:
        return decode_checkpoint(file.read())
