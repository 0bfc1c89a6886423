"""Reading and writing of BVH motion capture documents."""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from gesture_engine.errors import BvhParseError
from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.interfaces.interface_skeleton import Joint, Skeleton
from gesture_engine.motion_repr.canonicalize import remap_axes
from gesture_engine.motion_repr.rotations import quaternion_to_rotation, rotation_to_quaternion

log = logging.getLogger("BvhIO")

_ROTATION_CHANNELS = {"xrotation": "X", "yrotation": "Y", "zrotation": "Z"}
_POSITION_CHANNELS = {"xposition": 0, "yposition": 1, "zposition": 2}
_OUTPUT_ORDER = "ZYX"


@dataclass
class _JointRecord:
    name: str
    parent: int | None
    offset: tuple[float, float, float] = (0.0, 0.0, 0.0)
    channels: list[str] = field(default_factory=list)
    end_site: tuple[float, float, float] | None = None


class _LineReader:
    """Token reader over the non-empty lines of a document, keeps track of line numbers."""

    def __init__(self, text: str):
        self.lines = [(k + 1, line.split()) for k, line in enumerate(text.splitlines()) if line.strip()]
        self.pos = 0

    @property
    def line_number(self) -> int | None:
        if self.pos < len(self.lines):
            return self.lines[self.pos][0]
        return self.lines[-1][0] if self.lines else None

    def peek(self) -> list[str]:
        if self.pos >= len(self.lines):
            raise BvhParseError("unexpected end of document", self.line_number)
        return self.lines[self.pos][1]

    def next(self) -> tuple[int, list[str]]:
        tokens = self.peek()
        number = self.lines[self.pos][0]
        self.pos += 1
        return number, tokens

    def expect(self, keyword: str) -> tuple[int, list[str]]:
        number, tokens = self.next()
        if tokens[0].upper() != keyword.upper():
            raise BvhParseError(f"expected {keyword!r}, found {tokens[0]!r}", number)
        return number, tokens


def _parse_floats(tokens: list[str], line_number: int) -> list[float]:
    try:
        values = [float(token) for token in tokens]
    except ValueError as exc:
        raise BvhParseError(f"invalid number in {' '.join(tokens)!r}", line_number) from exc
    if not np.isfinite(values).all():
        raise BvhParseError("non-finite value", line_number)
    return values


def _parse_offset(reader: _LineReader) -> tuple[float, float, float]:
    number, tokens = reader.expect("OFFSET")
    if len(tokens) != 4:
        raise BvhParseError(f"OFFSET requires 3 values, got {len(tokens) - 1}", number)
    values = _parse_floats(tokens[1:], number)
    return (values[0], values[1], values[2])


def _parse_joint(reader: _LineReader, name: str, parent: int | None, records: list[_JointRecord]) -> None:
    index = len(records)
    record = _JointRecord(name=name, parent=parent)
    records.append(record)
    reader.expect("{")
    record.offset = _parse_offset(reader)
    number, tokens = reader.expect("CHANNELS")
    try:
        count = int(tokens[1])
    except (IndexError, ValueError) as exc:
        raise BvhParseError("CHANNELS requires a channel count", number) from exc
    if len(tokens) - 2 != count:
        raise BvhParseError(f"CHANNELS declares {count} channels but lists {len(tokens) - 2}", number)
    for channel in tokens[2:]:
        if channel.lower() not in _ROTATION_CHANNELS and channel.lower() not in _POSITION_CHANNELS:
            raise BvhParseError(f"unknown channel {channel!r}", number)
    record.channels = [channel.lower() for channel in tokens[2:]]

    while True:
        number, tokens = reader.next()
        keyword = tokens[0].upper()
        if keyword == "}":
            return
        if keyword == "JOINT":
            if len(tokens) < 2:
                raise BvhParseError("JOINT requires a name", number)
            _parse_joint(reader, " ".join(tokens[1:]), index, records)
        elif keyword == "END":
            reader.expect("{")
            record.end_site = _parse_offset(reader)
            reader.expect("}")
        else:
            raise BvhParseError(f"unexpected token {tokens[0]!r} in joint {name}", number)


def _euler_to_quaternion(angles: np.ndarray, order: str) -> np.ndarray:
    """Convert intrinsic Euler angles in degrees (channel order) to (w, x, y, z) quaternions."""
    if not order:
        quat = np.zeros((angles.shape[0], 4))
        quat[:, 0] = 1.0
        return quat
    return rotation_to_quaternion(Rotation.from_euler(order.upper(), angles, degrees=True), (angles.shape[0],))


def parse_bvh(data: bytes, axis_map: tuple[str, ...] | list[str] | None = None) -> tuple[Skeleton, MotionClip]:
    """Parse a BVH document.

    Parameters
    ----------
    data
        Raw BVH document
    axis_map, optional
        Source axis per engine axis, e.g. ``("x", "z", "-y")``, by default None (no remapping)

    Returns
    -------
        Skeleton mirroring the joint tree and the motion clip referring to it

    Raises
    ------
    BvhParseError
        Malformed header, channel-count mismatch, frame-count mismatch or non-finite values,
        the message names the offending line
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise BvhParseError("document is not valid UTF-8 text") from exc
    reader = _LineReader(text)
    if not reader.lines:
        raise BvhParseError("empty document", None)

    reader.expect("HIERARCHY")
    number, tokens = reader.expect("ROOT")
    if len(tokens) < 2:
        raise BvhParseError("ROOT requires a name", number)
    records: list[_JointRecord] = []
    _parse_joint(reader, " ".join(tokens[1:]), None, records)

    reader.expect("MOTION")
    number, tokens = reader.next()
    if tokens[0].lower() != "frames:" or len(tokens) != 2:
        raise BvhParseError("expected 'Frames: <count>'", number)
    try:
        num_frames = int(tokens[1])
    except ValueError as exc:
        raise BvhParseError(f"invalid frame count {tokens[1]!r}", number) from exc
    if num_frames < 1:
        raise BvhParseError(f"frame count must be >= 1, got {num_frames}", number)
    number, tokens = reader.next()
    if [t.lower() for t in tokens[:2]] != ["frame", "time:"] or len(tokens) != 3:
        raise BvhParseError("expected 'Frame Time: <seconds>'", number)
    frame_time = _parse_floats(tokens[2:], number)[0]
    if frame_time <= 0:
        raise BvhParseError(f"frame time must be positive, got {frame_time}", number)

    num_channels = sum(len(r.channels) for r in records)
    rows = []
    for _ in range(num_frames):
        if reader.pos >= len(reader.lines):
            raise BvhParseError(f"MOTION section holds {len(rows)} rows, header declares {num_frames}",
                                reader.line_number)
        number, tokens = reader.next()
        if len(tokens) != num_channels:
            raise BvhParseError(f"frame row has {len(tokens)} values, hierarchy declares {num_channels}", number)
        rows.append(_parse_floats(tokens, number))
    if reader.pos < len(reader.lines):
        raise BvhParseError(f"MOTION section holds more rows than the declared {num_frames}", reader.line_number)
    values = np.asarray(rows, dtype=float).reshape(num_frames, num_channels)

    skeleton = Skeleton(tuple(Joint(r.name, r.parent, r.offset, r.end_site) for r in records))
    root_translation = np.tile(np.asarray(records[0].offset, dtype=float), (num_frames, 1))
    rotations = np.empty((num_frames, len(records), 4))
    column = 0
    for k, record in enumerate(records):
        order = ""
        angle_columns = []
        for channel in record.channels:
            if channel in _ROTATION_CHANNELS:
                order += _ROTATION_CHANNELS[channel]
                angle_columns.append(column)
            elif k == 0:
                root_translation[:, _POSITION_CHANNELS[channel]] = values[:, column]
            column += 1
        if k > 0 and len(angle_columns) != len(record.channels):
            log.warning("Ignoring position channels of non-root joint %s", record.name)
        rotations[:, k] = _euler_to_quaternion(values[:, angle_columns], order)

    clip = MotionClip(skeleton, 1.0 / frame_time, root_translation, rotations)
    if axis_map is not None:
        clip = remap_axes(clip, axis_map)
    log.debug("Parsed BVH: %d joints, %d frames at %.2f fps", skeleton.num_joints, num_frames, clip.fps)
    return clip.skeleton, clip


def _format(values: np.ndarray) -> str:
    # Adding 0.0 removes negative zeros after rounding
    return " ".join(f"{v:.6f}" for v in np.round(values, 6) + 0.0)


def write_bvh(skeleton: Skeleton, clip: MotionClip) -> bytes:
    """Write a clip as BVH document.

    The root carries position channels and every joint carries ZYX Euler channels,
    all values are written with six decimals.

    Parameters
    ----------
    skeleton
        Skeleton of the clip
    clip
        Motion clip

    Returns
    -------
        UTF-8 encoded BVH document
    """
    if clip.skeleton != skeleton:
        raise ValueError("Motion clip does not refer to the given skeleton")
    rotation_channels = " ".join(f"{axis}rotation" for axis in _OUTPUT_ORDER)
    lines = ["HIERARCHY"]

    def _write_joint(index: int, depth: int) -> None:
        joint = skeleton.joints[index]
        indent = "  " * depth
        if joint.parent is None:
            lines.append(f"ROOT {joint.name}")
            channels = f"CHANNELS 6 Xposition Yposition Zposition {rotation_channels}"
        else:
            lines.append(f"{indent}JOINT {joint.name}")
            channels = f"CHANNELS 3 {rotation_channels}"
        lines.append(f"{indent}{{")
        lines.append(f"{indent}  OFFSET {_format(np.asarray(joint.offset))}")
        lines.append(f"{indent}  {channels}")
        for child in skeleton.children(index):
            _write_joint(child, depth + 1)
        if joint.end_site is not None:
            lines.extend([f"{indent}  End Site", f"{indent}  {{",
                          f"{indent}    OFFSET {_format(np.asarray(joint.end_site))}", f"{indent}  }}"])
        lines.append(f"{indent}}}")

    _write_joint(0, 0)

    # Joint order in the document follows the depth-first traversal
    order: list[int] = []

    def _visit(index: int) -> None:
        order.append(index)
        for child in skeleton.children(index):
            _visit(child)

    _visit(0)

    angles = quaternion_to_rotation(clip.joint_rotations).as_euler(_OUTPUT_ORDER, degrees=True)
    angles = angles.reshape(clip.num_frames, skeleton.num_joints, 3)
    lines.extend(["MOTION", f"Frames: {clip.num_frames}", f"Frame Time: {1.0 / clip.fps:.6f}"])
    for frame in range(clip.num_frames):
        row = np.concatenate([clip.root_translation[frame], angles[frame, order].reshape(-1)])
        lines.append(_format(row))
    return ("\n".join(lines) + "\n").encode("utf-8")
