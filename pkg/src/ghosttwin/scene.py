"""Authoritative scene model and its on-disk JSON format.

The scene stands in for the scanned room: oriented-box surface anchors
(floor, shelf, ...) plus physical objects, each with a current pose and a
default pose. Scene values are immutable snapshots; mutation happens by
building a new Scene.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Any, Optional

from . import canonical
from .transforms import Quat, Vec3, qnorm, qrotate, vadd, vdot

SCENE_VERSION = 1
QUAT_UNIT_TOL = 1e-9
LOAD_PENETRATION_TOL = 1e-6
WALKABLE_MAX_TILT_RAD = math.radians(30.0)

WORLD_UP: Vec3 = (0.0, 1.0, 0.0)


class SceneParseError(ValueError):
    """Malformed scene text or schema violation."""


class SceneValidationError(ValueError):
    """A scene invariant is violated; carries the offending id."""

    def __init__(self, message: str, offender: str = ""):
        super().__init__(message)
        self.offender = offender


@dataclass(frozen=True)
class Pose:
    position: Vec3
    orientation: Quat  # (w, x, y, z), unit

    def validate(self, owner: str) -> None:
        if not all(math.isfinite(c) for c in self.position):
            raise SceneValidationError(
                f"{owner}: pose position must be finite, got {self.position}", owner
            )
        if abs(qnorm(self.orientation) - 1.0) > QUAT_UNIT_TOL:
            raise SceneValidationError(
                f"{owner}: orientation quaternion not unit length "
                f"(|q|={qnorm(self.orientation)!r})",
                owner,
            )


@dataclass(frozen=True)
class BoxShape:
    half_extents: Vec3  # object-local axes, meters

    def validate(self, owner: str) -> None:
        if not all(h > 0.0 for h in self.half_extents):
            raise SceneValidationError(
                f"{owner}: half_extents must be positive, got {self.half_extents}",
                owner,
            )


def world_corners(pose: Pose, shape: BoxShape) -> tuple[Vec3, ...]:
    """The 8 world-space corners of an oriented box."""
    hx, hy, hz = shape.half_extents
    corners = []
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            for sz in (-1.0, 1.0):
                local = (sx * hx, sy * hy, sz * hz)
                corners.append(vadd(qrotate(pose.orientation, local), pose.position))
    return tuple(corners)


def compressed_box(pose: Pose, shape: BoxShape, factor: float) -> tuple[Pose, BoxShape]:
    """Box with its height scaled by factor, base face fixed (compression is downward)."""
    if factor == 1.0:
        return pose, shape
    hx, hy, hz = shape.half_extents
    drop = hy * (1.0 - factor)
    center = vadd(pose.position, qrotate(pose.orientation, (0.0, -drop, 0.0)))
    return Pose(center, pose.orientation), BoxShape((hx, hy * factor, hz))


@dataclass(frozen=True)
class SurfaceAnchor:
    id: str
    label: str
    pose: Pose
    shape: BoxShape
    walkable_top: bool


@dataclass(frozen=True)
class FillState:
    fill_level: float  # fraction 0..1
    capacity_height: float  # meters of hand travel for a full fill


@dataclass(frozen=True)
class CompressState:
    min_height_factor: float  # fraction 0..1
    current_factor: float  # in [min_height_factor, 1]


@dataclass(frozen=True)
class PhysicalObject:
    id: str
    label: str
    shape: BoxShape
    pose: Pose
    default_pose: Pose
    graspable: bool
    fillable: Optional[FillState] = None
    compressible: Optional[CompressState] = None


def object_world_box(obj: PhysicalObject) -> tuple[Pose, BoxShape]:
    """Current world box of a physical object, compression applied."""
    factor = obj.compressible.current_factor if obj.compressible else 1.0
    return compressed_box(obj.pose, obj.shape, factor)


@dataclass(frozen=True)
class Scene:
    anchors: tuple[SurfaceAnchor, ...]
    objects: tuple[PhysicalObject, ...]
    gravity_up: Vec3 = WORLD_UP

    def anchor(self, anchor_id: str) -> SurfaceAnchor:
        for a in self.anchors:
            if a.id == anchor_id:
                return a
        raise KeyError(anchor_id)

    def object(self, object_id: str) -> PhysicalObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise KeyError(object_id)

    def has_object(self, object_id: str) -> bool:
        return any(o.id == object_id for o in self.objects)

    def with_object(self, updated: PhysicalObject) -> "Scene":
        objs = tuple(updated if o.id == updated.id else o for o in self.objects)
        return replace(self, objects=objs)


# -- parsing ---------------------------------------------------------------


def _require_keys(raw: dict, allowed: set[str], required: set[str], where: str) -> None:
    keys = set(raw)
    unknown = keys - allowed
    if unknown:
        raise SceneParseError(f"{where}: unknown fields {sorted(unknown)}")
    missing = required - keys
    if missing:
        raise SceneParseError(f"{where}: missing fields {sorted(missing)}")


def _as_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _as_vec3(value: Any, where: str) -> Vec3:
    if not isinstance(value, list) or len(value) != 3:
        raise SceneParseError(f"{where}: expected a 3-element array")
    return (
        _as_float(value[0], where),
        _as_float(value[1], where),
        _as_float(value[2], where),
    )


def _as_quat(value: Any, where: str) -> Quat:
    if not isinstance(value, list) or len(value) != 4:
        raise SceneParseError(f"{where}: expected a 4-element array [w,x,y,z]")
    return (
        _as_float(value[0], where),
        _as_float(value[1], where),
        _as_float(value[2], where),
        _as_float(value[3], where),
    )


def _parse_pose(raw: Any, where: str) -> Pose:
    if not isinstance(raw, dict):
        raise SceneParseError(f"{where}: pose must be an object")
    _require_keys(raw, {"position", "orientation"}, {"position", "orientation"}, where)
    return Pose(
        position=_as_vec3(raw["position"], f"{where}.position"),
        orientation=_as_quat(raw["orientation"], f"{where}.orientation"),
    )


def _parse_anchor(raw: Any, index: int) -> SurfaceAnchor:
    where = f"anchors[{index}]"
    if not isinstance(raw, dict):
        raise SceneParseError(f"{where}: expected an object")
    allowed = {"id", "label", "pose", "half_extents", "walkable_top"}
    _require_keys(raw, allowed, allowed, where)
    if not isinstance(raw["id"], str) or not raw["id"]:
        raise SceneParseError(f"{where}: id must be a non-empty string")
    if not isinstance(raw["walkable_top"], bool):
        raise SceneParseError(f"{where}: walkable_top must be a boolean")
    return SurfaceAnchor(
        id=raw["id"],
        label=str(raw["label"]),
        pose=_parse_pose(raw["pose"], f"{where}.pose"),
        shape=BoxShape(_as_vec3(raw["half_extents"], f"{where}.half_extents")),
        walkable_top=raw["walkable_top"],
    )


def _parse_object(raw: Any, index: int) -> PhysicalObject:
    where = f"objects[{index}]"
    if not isinstance(raw, dict):
        raise SceneParseError(f"{where}: expected an object")
    allowed = {
        "id",
        "label",
        "pose",
        "half_extents",
        "default_pose",
        "graspable",
        "fillable",
        "compressible",
    }
    _require_keys(raw, allowed, {"id", "label", "pose", "half_extents", "graspable"}, where)
    if not isinstance(raw["id"], str) or not raw["id"]:
        raise SceneParseError(f"{where}: id must be a non-empty string")
    if not isinstance(raw["graspable"], bool):
        raise SceneParseError(f"{where}: graspable must be a boolean")
    pose = _parse_pose(raw["pose"], f"{where}.pose")
    # A missing default means "where it is now is where it belongs".
    if "default_pose" in raw:
        default_pose = _parse_pose(raw["default_pose"], f"{where}.default_pose")
    else:
        default_pose = pose

    fillable = None
    if "fillable" in raw:
        fraw = raw["fillable"]
        fwhere = f"{where}.fillable"
        if not isinstance(fraw, dict):
            raise SceneParseError(f"{fwhere}: expected an object")
        keys = {"fill_level", "capacity_height"}
        _require_keys(fraw, keys, keys, fwhere)
        fillable = FillState(
            fill_level=_as_float(fraw["fill_level"], fwhere),
            capacity_height=_as_float(fraw["capacity_height"], fwhere),
        )

    compressible = None
    if "compressible" in raw:
        craw = raw["compressible"]
        cwhere = f"{where}.compressible"
        if not isinstance(craw, dict):
            raise SceneParseError(f"{cwhere}: expected an object")
        keys = {"min_height_factor", "current_factor"}
        _require_keys(craw, keys, keys, cwhere)
        compressible = CompressState(
            min_height_factor=_as_float(craw["min_height_factor"], cwhere),
            current_factor=_as_float(craw["current_factor"], cwhere),
        )

    return PhysicalObject(
        id=raw["id"],
        label=str(raw["label"]),
        shape=BoxShape(_as_vec3(raw["half_extents"], f"{where}.half_extents")),
        pose=pose,
        default_pose=default_pose,
        graspable=raw["graspable"],
        fillable=fillable,
        compressible=compressible,
    )


def load_scene(text: str) -> Scene:
    """Parse and fully validate a scene from its JSON text form."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"malformed scene JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SceneParseError("scene file must contain a JSON object")
    allowed = {"version", "gravity_up", "anchors", "objects"}
    _require_keys(raw, allowed, {"version", "anchors", "objects"}, "scene")
    if raw["version"] != SCENE_VERSION:
        raise SceneParseError(f"unsupported scene version {raw['version']!r}")
    gravity_up: Vec3 = WORLD_UP
    if "gravity_up" in raw:
        gravity_up = _as_vec3(raw["gravity_up"], "scene.gravity_up")
    if not isinstance(raw["anchors"], list) or not isinstance(raw["objects"], list):
        raise SceneParseError("scene anchors/objects must be arrays")
    scene = Scene(
        anchors=tuple(_parse_anchor(a, i) for i, a in enumerate(raw["anchors"])),
        objects=tuple(_parse_object(o, i) for i, o in enumerate(raw["objects"])),
        gravity_up=gravity_up,
    )
    validate_scene(scene)
    return scene


def validate_scene(scene: Scene) -> None:
    """Check every scene invariant; raises SceneValidationError naming the offender."""
    up_norm = math.sqrt(vdot(scene.gravity_up, scene.gravity_up))
    if abs(up_norm - 1.0) > QUAT_UNIT_TOL:
        raise SceneValidationError(
            f"gravity_up must be a unit vector, got {scene.gravity_up}", "scene"
        )

    seen: set[str] = set()
    for a in scene.anchors:
        if a.id in seen:
            raise SceneValidationError(f"duplicate id {a.id!r}", a.id)
        seen.add(a.id)
        a.pose.validate(a.id)
        a.shape.validate(a.id)
        if a.walkable_top:
            top_normal = qrotate(a.pose.orientation, (0.0, 1.0, 0.0))
            cosine = vdot(top_normal, scene.gravity_up)
            if cosine < math.cos(WALKABLE_MAX_TILT_RAD) - 1e-12:
                raise SceneValidationError(
                    f"anchor {a.id!r}: walkable top tilted more than 30 degrees from up",
                    a.id,
                )

    for o in scene.objects:
        if o.id in seen:
            raise SceneValidationError(f"duplicate id {o.id!r}", o.id)
        seen.add(o.id)
        o.pose.validate(o.id)
        o.default_pose.validate(o.id)
        o.shape.validate(o.id)
        if o.fillable is not None:
            if not 0.0 <= o.fillable.fill_level <= 1.0:
                raise SceneValidationError(
                    f"object {o.id!r}: fill_level {o.fillable.fill_level} outside [0, 1]",
                    o.id,
                )
            if o.fillable.capacity_height <= 0.0:
                raise SceneValidationError(
                    f"object {o.id!r}: capacity_height must be positive", o.id
                )
        if o.compressible is not None:
            lo = o.compressible.min_height_factor
            if not 0.0 < lo <= 1.0:
                raise SceneValidationError(
                    f"object {o.id!r}: min_height_factor {lo} outside (0, 1]", o.id
                )
            if not lo <= o.compressible.current_factor <= 1.0:
                raise SceneValidationError(
                    f"object {o.id!r}: current_factor {o.compressible.current_factor} "
                    f"outside [{lo}, 1]",
                    o.id,
                )

    # Physical consistency checks live in the physics module; imported lazily
    # because physics builds on these scene types.
    from .physics import penetration_depth, resting_support

    for i, a in enumerate(scene.objects):
        box_a = object_world_box(a)
        for b in scene.objects[i + 1 :]:
            box_b = object_world_box(b)
            depth = penetration_depth(box_a[0], box_a[1], box_b[0], box_b[1])
            if depth > LOAD_PENETRATION_TOL:
                raise SceneValidationError(
                    f"objects {a.id!r} and {b.id!r} interpenetrate by {depth:.3g} m",
                    a.id,
                )

    for o in scene.objects:
        supports = [
            (a.pose, a.shape) for a in scene.anchors if a.walkable_top
        ] + [
            (other.default_pose, other.shape)
            for other in scene.objects
            if other.id != o.id
        ]
        if resting_support(o.default_pose, o.shape, supports, scene.gravity_up) is None:
            raise SceneValidationError(
                f"object {o.id!r}: default_pose does not rest on any support surface",
                o.id,
            )


# -- serialization ---------------------------------------------------------


def _pose_to_raw(pose: Pose) -> dict:
    return {
        "position": [float(c) for c in pose.position],
        "orientation": [float(c) for c in pose.orientation],
    }


def scene_to_raw(scene: Scene) -> dict:
    """Scene as plain JSON-ready data (the on-disk schema)."""
    raw: dict[str, Any] = {
        "version": SCENE_VERSION,
        "gravity_up": [float(c) for c in scene.gravity_up],
        "anchors": [
            {
                "id": a.id,
                "label": a.label,
                "pose": _pose_to_raw(a.pose),
                "half_extents": [float(c) for c in a.shape.half_extents],
                "walkable_top": a.walkable_top,
            }
            for a in scene.anchors
        ],
        "objects": [],
    }
    for o in scene.objects:
        entry: dict[str, Any] = {
            "id": o.id,
            "label": o.label,
            "pose": _pose_to_raw(o.pose),
            "half_extents": [float(c) for c in o.shape.half_extents],
            "default_pose": _pose_to_raw(o.default_pose),
            "graspable": o.graspable,
        }
        if o.fillable is not None:
            entry["fillable"] = {
                "fill_level": o.fillable.fill_level,
                "capacity_height": o.fillable.capacity_height,
            }
        if o.compressible is not None:
            entry["compressible"] = {
                "min_height_factor": o.compressible.min_height_factor,
                "current_factor": o.compressible.current_factor,
            }
        raw["objects"].append(entry)
    return raw


def save_scene(scene: Scene) -> str:
    """Canonical serialization; load_scene(save_scene(s)) reproduces s exactly."""
    return canonical.dumps(scene_to_raw(scene)) + "\n"
