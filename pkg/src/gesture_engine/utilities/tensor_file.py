"""Binary tensor file format.

Layout, little-endian::

    magic      4 bytes  b"FTKT"
    version    u32      1
    dtype tag  u8       1 float32, 2 float64, 3 int64, 4 uint8
    ndim       u32
    dims       u64 x ndim
    payload    row-major, product(dims) x item size bytes
"""
import os
import struct

import numpy as np

from gesture_engine.errors import TensorFileError

MAGIC: bytes = b"FTKT"
VERSION: int = 1

DTYPE_TAGS: dict[int, np.dtype] = {
    1: np.dtype("<f4"),
    2: np.dtype("<f8"),
    3: np.dtype("<i8"),
    4: np.dtype("u1"),
}
_TAG_OF_KIND: dict[str, int] = {"float32": 1, "float64": 2, "int64": 3, "uint8": 4}
_HEADER = struct.Struct("<4sIBI")


def encode_tensor(array: np.ndarray) -> bytes:
    """Serialize an array, booleans are stored as uint8.

    Raises
    ------
    TensorFileError
        Unsupported element type
    """
    array = np.asarray(array)
    if array.dtype == np.bool_:
        array = array.astype(np.uint8)
    tag = _TAG_OF_KIND.get(array.dtype.name)
    if tag is None:
        raise TensorFileError(f"Unsupported tensor element type {array.dtype}")
    payload = np.ascontiguousarray(array, dtype=DTYPE_TAGS[tag]).tobytes()
    dims = struct.pack(f"<{array.ndim}Q", *array.shape)
    return _HEADER.pack(MAGIC, VERSION, tag, array.ndim) + dims + payload


def decode_tensor(data: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    """Deserialize one tensor starting at ``offset``.

    Returns
    -------
        The array and the offset of the first byte after the tensor

    Raises
    ------
    TensorFileError
        Bad magic, unknown version or element type, truncated payload
    """
    if len(data) - offset < _HEADER.size:
        raise TensorFileError("Tensor header is truncated")
    magic, version, tag, ndim = _HEADER.unpack_from(data, offset)
    if magic != MAGIC:
        raise TensorFileError(f"Invalid tensor magic {magic!r}")
    if version != VERSION:
        raise TensorFileError(f"Unsupported tensor format version {version}")
    if tag not in DTYPE_TAGS:
        raise TensorFileError(f"Unknown tensor element type tag {tag}")
    offset += _HEADER.size
    if len(data) - offset < 8 * ndim:
        raise TensorFileError("Tensor dimensions are truncated")
    shape = struct.unpack_from(f"<{ndim}Q", data, offset)
    offset += 8 * ndim
    dtype = DTYPE_TAGS[tag]
    length = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
    if len(data) - offset < length:
        raise TensorFileError(f"Tensor payload holds {len(data) - offset} bytes, header declares {length}")
    array = np.frombuffer(data, dtype=dtype, count=length // dtype.itemsize, offset=offset).reshape(shape)
    return array.copy(), offset + length


def write_tensor(path: str | os.PathLike, array: np.ndarray) -> None:
    """Write a single tensor file."""
    with open(path, "wb") as file:
        file.write(encode_tensor(array))


def read_tensor(path: str | os.PathLike) -> np.ndarray:
    """Read a single tensor file.

    Raises
    ------
    TensorFileError
        Invalid file or trailing bytes after the payload
    """
    with open(path, "rb") as file:
        data = file.read()
    array, end = decode_tensor(data)
    if end != len(data):
        raise TensorFileError(f"Tensor file {path} has {len(data) - end} trailing bytes")
    return array
