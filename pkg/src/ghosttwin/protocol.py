"""Robot task compilation and the newline-delimited JSON wire format.

Committing a session diffs each placed ghost against its physical twin and
emits one task per difference: pose -> pick_and_place, fill level -> fill,
height factor -> compress. Encoding is canonical (sorted keys, 17
significant digits) so identical batches are byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

from . import canonical
from .ghosts import PHASE_GRABBED, GhostObject, effective_box
from .physics import box_height_interval
from .scene import Pose, Scene
from .transforms import qmul, qconj, quat_angle

WIRE_VERSION = 1
CHANGE_TOL = 1e-6  # below this, pose/level deltas are settle round-off noise

KIND_PICK_AND_PLACE = "pick_and_place"
KIND_FILL = "fill"
KIND_COMPRESS = "compress"

STATE_ACCEPTED = "accepted"
STATE_IN_PROGRESS = "in_progress"
STATE_DONE = "done"
STATE_FAILED = "failed"


class ProtocolError(ValueError):
    """Malformed or unsupported wire data."""


@dataclass(frozen=True)
class Instruction:
    seq: int
    kind: str
    object_id: str
    target_pose: Optional[Pose] = None
    target_level: Optional[float] = None
    target_factor: Optional[float] = None

    def __post_init__(self):
        if self.seq < 1:
            raise ProtocolError(f"instruction seq must be >= 1, got {self.seq}")
        wanted = {
            KIND_PICK_AND_PLACE: (self.target_pose, self.target_level, self.target_factor),
            KIND_FILL: (self.target_level, self.target_pose, self.target_factor),
            KIND_COMPRESS: (self.target_factor, self.target_pose, self.target_level),
        }
        if self.kind not in wanted:
            raise ProtocolError(f"unknown instruction kind {self.kind!r}")
        present, *absent = wanted[self.kind]
        if present is None or any(a is not None for a in absent):
            raise ProtocolError(
                f"instruction kind {self.kind!r} carries exactly its own target field"
            )


@dataclass(frozen=True)
class RobotStatus:
    seq: int
    state: str
    progress: Optional[float] = None
    reason: Optional[str] = None

    def __post_init__(self):
        if self.state not in (STATE_ACCEPTED, STATE_IN_PROGRESS, STATE_DONE, STATE_FAILED):
            raise ProtocolError(f"unknown status state {self.state!r}")
        if (self.state == STATE_IN_PROGRESS) != (self.progress is not None):
            raise ProtocolError("progress is present exactly on in_progress")
        if (self.state == STATE_FAILED) != (self.reason is not None):
            raise ProtocolError("reason is present exactly on failed")


def pose_changed(a: Pose, b: Pose, tol: float = CHANGE_TOL) -> bool:
    translation = math.dist(a.position, b.position)
    rotation = quat_angle(qmul(qconj(a.orientation), b.orientation))
    return translation > tol or rotation > tol


def compile_instructions(
    ghosts: Sequence[GhostObject], scene: Scene
) -> tuple[Instruction, ...]:
    """Diff ghosts against their twins and order the batch for execution.

    Pick-and-place tasks run bottom-up by target support height so stacked
    targets are buildable; deformations follow.
    """
    if any(g.phase == PHASE_GRABBED for g in ghosts):
        raise ValueError("cannot compile while a ghost is grabbed")

    picks: list[tuple[float, str, GhostObject]] = []
    fills: list[GhostObject] = []
    compressions: list[GhostObject] = []
    for g in ghosts:
        obj = scene.object(g.object_id)
        if pose_changed(g.pose, obj.pose):
            target_box = effective_box(g, obj)
            bottom = box_height_interval(target_box[0], target_box[1], scene.gravity_up)[0]
            picks.append((bottom, g.object_id, g))
        if (
            g.fill_level is not None
            and obj.fillable is not None
            and abs(g.fill_level - obj.fillable.fill_level) > CHANGE_TOL
        ):
            fills.append(g)
        if (
            g.height_factor is not None
            and obj.compressible is not None
            and abs(g.height_factor - obj.compressible.current_factor) > CHANGE_TOL
        ):
            compressions.append(g)

    batch: list[Instruction] = []
    seq = 1
    for _, _, g in sorted(picks, key=lambda item: (item[0], item[1])):
        batch.append(
            Instruction(seq=seq, kind=KIND_PICK_AND_PLACE, object_id=g.object_id, target_pose=g.pose)
        )
        seq += 1
    for g in sorted(fills, key=lambda g: g.object_id):
        batch.append(
            Instruction(seq=seq, kind=KIND_FILL, object_id=g.object_id, target_level=g.fill_level)
        )
        seq += 1
    for g in sorted(compressions, key=lambda g: g.object_id):
        batch.append(
            Instruction(
                seq=seq, kind=KIND_COMPRESS, object_id=g.object_id, target_factor=g.height_factor
            )
        )
        seq += 1
    return tuple(batch)


# -- wire encoding -----------------------------------------------------------


def _pose_raw(pose: Pose) -> dict:
    return {
        "position": [float(c) for c in pose.position],
        "orientation": [float(c) for c in pose.orientation],
    }


def _pose_from_raw(raw: object) -> Pose:
    if (
        not isinstance(raw, dict)
        or set(raw) != {"position", "orientation"}
        or not isinstance(raw["position"], list)
        or not isinstance(raw["orientation"], list)
        or len(raw["position"]) != 3
        or len(raw["orientation"]) != 4
    ):
        raise ProtocolError(f"malformed pose {raw!r}")
    pos = tuple(float(c) for c in raw["position"])
    quat = tuple(float(c) for c in raw["orientation"])
    return Pose(pos, quat)  # type: ignore[arg-type]


def encode(value: Union[Instruction, RobotStatus]) -> str:
    """One canonical JSON line (no trailing newline)."""
    if isinstance(value, Instruction):
        raw: dict = {
            "v": WIRE_VERSION,
            "type": "instruction",
            "seq": value.seq,
            "kind": value.kind,
            "object_id": value.object_id,
        }
        if value.target_pose is not None:
            raw["target_pose"] = _pose_raw(value.target_pose)
        if value.target_level is not None:
            raw["target_level"] = float(value.target_level)
        if value.target_factor is not None:
            raw["target_factor"] = float(value.target_factor)
    elif isinstance(value, RobotStatus):
        raw = {
            "v": WIRE_VERSION,
            "type": "status",
            "seq": value.seq,
            "state": value.state,
        }
        if value.progress is not None:
            raw["progress"] = float(value.progress)
        if value.reason is not None:
            raw["reason"] = value.reason
    else:
        raise ProtocolError(f"cannot encode {type(value).__name__}")
    return canonical.dumps(raw)


def decode(line: str) -> Union[Instruction, RobotStatus]:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed wire line: {exc}") from exc
    if not isinstance(raw, dict):
        raise ProtocolError("wire line must be a JSON object")
    if raw.get("v") != WIRE_VERSION:
        raise ProtocolError(f"unsupported wire version {raw.get('v')!r}")
    kind = raw.get("type")
    if kind == "instruction":
        allowed = {"v", "type", "seq", "kind", "object_id", "target_pose", "target_level", "target_factor"}
        unknown = set(raw) - allowed
        if unknown:
            raise ProtocolError(f"unknown instruction fields {sorted(unknown)}")
        if not isinstance(raw.get("seq"), int) or not isinstance(raw.get("object_id"), str):
            raise ProtocolError("instruction needs integer seq and string object_id")
        return Instruction(
            seq=raw["seq"],
            kind=raw.get("kind", ""),
            object_id=raw["object_id"],
            target_pose=_pose_from_raw(raw["target_pose"]) if "target_pose" in raw else None,
            target_level=float(raw["target_level"]) if "target_level" in raw else None,
            target_factor=float(raw["target_factor"]) if "target_factor" in raw else None,
        )
    if kind == "status":
        allowed = {"v", "type", "seq", "state", "progress", "reason"}
        unknown = set(raw) - allowed
        if unknown:
            raise ProtocolError(f"unknown status fields {sorted(unknown)}")
        if not isinstance(raw.get("seq"), int) or not isinstance(raw.get("state"), str):
            raise ProtocolError("status needs integer seq and string state")
        return RobotStatus(
            seq=raw["seq"],
            state=raw["state"],
            progress=float(raw["progress"]) if "progress" in raw else None,
            reason=raw["reason"] if "reason" in raw else None,
        )
    raise ProtocolError(f"unknown wire message type {kind!r}")


def encode_lines(values: Iterable[Union[Instruction, RobotStatus]]) -> str:
    """Newline-delimited encoding with a trailing newline; empty for no values."""
    return "".join(encode(v) + "\n" for v in values)


def iter_decode(text: str) -> Iterator[Union[Instruction, RobotStatus]]:
    """Decode line by line; raises ProtocolError naming the failing line,
    after every prior value has already been yielded."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield decode(line)
        except ProtocolError as exc:
            raise ProtocolError(f"line {lineno}: {exc}") from exc
