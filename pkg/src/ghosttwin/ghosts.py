"""Ghost twin lifecycle: spawn aligned on the real object, grab and move as a
rigid group, and deform (fill level, compression) within the object's bounds.

Ghost operations never touch the scene; only the robot executor mutates
physical objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from .scene import BoxShape, PhysicalObject, Pose, Scene, compressed_box
from .selection import SelectionResult
from .transforms import Quat, Vec3, compose, relative

PHASE_ALIGNED = "aligned"
PHASE_GRABBED = "grabbed"
PHASE_PLACED = "placed"


@dataclass(frozen=True)
class GhostObject:
    object_id: str  # its physical twin
    pose: Pose
    fill_level: Optional[float]
    height_factor: Optional[float]
    phase: str  # aligned | grabbed | placed
    group_id: int


@dataclass(frozen=True)
class GrabState:
    anchor_ghost: str
    # Rigid transform from controller frame to each ghost frame at grab time;
    # constant for the lifetime of one grab.
    grab_offsets: Mapping[str, tuple[Vec3, Quat]]
    # Captured so a controller at its grab pose reproduces ghost poses bit-exactly.
    controller_at_grab: Pose
    poses_at_grab: Mapping[str, Pose]


def effective_box(ghost: GhostObject, obj: PhysicalObject) -> tuple[Pose, BoxShape]:
    """World box of a ghost with its compression applied (base face fixed)."""
    factor = ghost.height_factor if ghost.height_factor is not None else 1.0
    return compressed_box(ghost.pose, obj.shape, factor)


def spawn_ghosts(
    selection: SelectionResult, scene: Scene, group_id: int
) -> tuple[GhostObject, ...]:
    """One aligned ghost per selected object, all sharing the group id."""
    if not selection.object_ids:
        raise ValueError("cannot spawn ghosts from an empty selection")
    ghosts = []
    for object_id in selection.object_ids:
        try:
            obj = scene.object(object_id)
        except KeyError:
            raise KeyError(f"stale selection: unknown object {object_id!r}") from None
        ghosts.append(
            GhostObject(
                object_id=object_id,
                pose=obj.pose,
                fill_level=obj.fillable.fill_level if obj.fillable else None,
                height_factor=obj.compressible.current_factor if obj.compressible else None,
                phase=PHASE_ALIGNED,
                group_id=group_id,
            )
        )
    return tuple(ghosts)


def grab(
    ghosts: Sequence[GhostObject], controller: Pose, pointed_ghost: str
) -> tuple[GrabState, tuple[GhostObject, ...]]:
    """Attach the whole group to the controller, anchored at the pointed ghost."""
    if not any(g.object_id == pointed_ghost for g in ghosts):
        raise ValueError(f"pointed ghost {pointed_ghost!r} is not in the group")
    offsets = {
        g.object_id: relative(
            controller.position, controller.orientation, g.pose.position, g.pose.orientation
        )
        for g in ghosts
    }
    grabbed = tuple(replace(g, phase=PHASE_GRABBED) for g in ghosts)
    state = GrabState(
        anchor_ghost=pointed_ghost,
        grab_offsets=offsets,
        controller_at_grab=controller,
        poses_at_grab={g.object_id: g.pose for g in ghosts},
    )
    return state, grabbed


def move(
    grab_state: GrabState, ghosts: Sequence[GhostObject], controller: Pose
) -> tuple[GhostObject, ...]:
    """Carry every grabbed ghost rigidly with the controller.

    A controller back at its grab pose restores grab poses bit-exactly.
    """
    at_grab = controller == grab_state.controller_at_grab
    moved = []
    for g in ghosts:
        if g.phase != PHASE_GRABBED:
            raise ValueError(f"ghost {g.object_id!r} is not grabbed")
        if at_grab:
            moved.append(replace(g, pose=grab_state.poses_at_grab[g.object_id]))
            continue
        off_pos, off_quat = grab_state.grab_offsets[g.object_id]
        pos, quat = compose(controller.position, controller.orientation, off_pos, off_quat)
        moved.append(replace(g, pose=Pose(pos, quat)))
    return tuple(moved)


def set_fill_by_drag(
    ghost: GhostObject,
    scene: Scene,
    start_controller_y: float,
    current_controller_y: float,
    start_level: float,
) -> float:
    """Map vertical hand travel to a fill level: one capacity height per full fill."""
    obj = scene.object(ghost.object_id)
    if obj.fillable is None:
        raise ValueError(f"object {ghost.object_id!r} is not fillable")
    delta = (current_controller_y - start_controller_y) / obj.fillable.capacity_height
    return min(1.0, max(0.0, start_level + delta))


def compress(ghost: GhostObject, scene: Scene, factor: float) -> GhostObject:
    """Set the ghost's height factor; the base face stays fixed."""
    obj = scene.object(ghost.object_id)
    if obj.compressible is None:
        raise ValueError(f"object {ghost.object_id!r} is not compressible")
    lo = obj.compressible.min_height_factor
    if not lo <= factor <= 1.0 or math.isnan(factor):
        raise ValueError(
            f"compression factor {factor} outside [{lo}, 1] for {ghost.object_id!r}"
        )
    return replace(ghost, height_factor=factor)
