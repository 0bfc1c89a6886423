"""Implementation of custom JSON encoder."""
import dataclasses
import hashlib
import json
import os
from enum import Enum
from typing import Any

import numpy as np


class JSONEncoder(json.JSONEncoder):
    """JSON Encoder class for dataclasses, numpy values, enums and paths."""

    def default(self, o):
        """Encode object default method.

        Parameters
        ----------
        o
            Object to encode

        Returns
        -------
            JSON encoded object
        """
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            if hasattr(o, "dict"):
                return o.dict()
            return {f.name: getattr(o, f.name) for f in dataclasses.fields(o) if f.init}
        if isinstance(o, Enum):
            return o.value
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, os.PathLike):
            return os.fspath(o)
        return super().default(o)


def dumps(obj: Any) -> str:
    """Serialize to the canonical JSON layout used for every written document."""
    return json.dumps(obj, cls=JSONEncoder, indent=4, sort_keys=True)


def digest(obj: Any) -> str:
    """SHA-256 hex digest of the canonical JSON serialization of ``obj``."""
    return hashlib.sha256(dumps(obj).encode("utf-8")).hexdigest()


def file_digest(path: str | os.PathLike) -> str:
    """SHA-256 hex digest of a file."""
    sha = hashlib.sha256()
    with open(path, "rb") as file:
        for block in iter(lambda: file.read(1 << 20), b""):
            sha.update(block)
    return sha.hexdigest()
