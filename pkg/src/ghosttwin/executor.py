"""Simulated robot: validates instruction batches, mutates the real scene,
and streams status lines.

The executor is logically a separate process from the authoring session: it
communicates only through encoded instruction/status lines, never by shared
state. Progress interpolation is cosmetic; correctness is the exact final
assignment per instruction.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterator, Optional, Sequence

from .physics import penetration_depth, resting_support
from .protocol import (
    KIND_COMPRESS,
    KIND_FILL,
    KIND_PICK_AND_PLACE,
    STATE_ACCEPTED,
    STATE_DONE,
    STATE_FAILED,
    STATE_IN_PROGRESS,
    Instruction,
    RobotStatus,
)
from .scene import BoxShape, Pose, Scene, object_world_box
from .transforms import qnlerp, vlerp

EXEC_PENETRATION_TOL = 1e-6


def validate(instr: Instruction, scene: Scene) -> Optional[str]:
    """None when feasible, else a short reason."""
    try:
        obj = scene.object(instr.object_id)
    except KeyError:
        return "unknown object"

    if instr.kind == KIND_PICK_AND_PLACE:
        assert instr.target_pose is not None
        moved = replace(obj, pose=instr.target_pose)
        pose, shape = object_world_box(moved)
        for a in scene.anchors:
            if penetration_depth(pose, shape, a.pose, a.shape) > EXEC_PENETRATION_TOL:
                return "penetration"
        others: list[tuple[Pose, BoxShape]] = []
        for o in scene.objects:
            if o.id == obj.id:
                continue
            other_box = object_world_box(o)
            others.append(other_box)
            if penetration_depth(pose, shape, other_box[0], other_box[1]) > EXEC_PENETRATION_TOL:
                return "penetration"
        supports = [
            (a.pose, a.shape) for a in scene.anchors if a.walkable_top
        ] + others
        if resting_support(pose, shape, supports, scene.gravity_up) is None:
            return "no support"
        return None

    if instr.kind == KIND_FILL:
        if obj.fillable is None:
            return "capability"
        assert instr.target_level is not None
        if not 0.0 <= instr.target_level <= 1.0:
            return "range"
        return None

    if instr.kind == KIND_COMPRESS:
        if obj.compressible is None:
            return "capability"
        assert instr.target_factor is not None
        if not obj.compressible.min_height_factor <= instr.target_factor <= 1.0:
            return "range"
        return None

    return "unknown kind"


def _apply(instr: Instruction, scene: Scene) -> Scene:
    obj = scene.object(instr.object_id)
    if instr.kind == KIND_PICK_AND_PLACE:
        return scene.with_object(replace(obj, pose=instr.target_pose))
    if instr.kind == KIND_FILL:
        assert obj.fillable is not None
        return scene.with_object(
            replace(obj, fillable=replace(obj.fillable, fill_level=instr.target_level))
        )
    assert obj.compressible is not None
    return scene.with_object(
        replace(obj, compressible=replace(obj.compressible, current_factor=instr.target_factor))
    )


def _interpolate(instr: Instruction, scene: Scene, fraction: float) -> Scene:
    obj = scene.object(instr.object_id)
    if instr.kind == KIND_PICK_AND_PLACE:
        assert instr.target_pose is not None
        pose = Pose(
            vlerp(obj.pose.position, instr.target_pose.position, fraction),
            qnlerp(obj.pose.orientation, instr.target_pose.orientation, fraction),
        )
        return scene.with_object(replace(obj, pose=pose))
    if instr.kind == KIND_FILL:
        assert obj.fillable is not None and instr.target_level is not None
        level = obj.fillable.fill_level + (instr.target_level - obj.fillable.fill_level) * fraction
        return scene.with_object(replace(obj, fillable=replace(obj.fillable, fill_level=level)))
    assert obj.compressible is not None and instr.target_factor is not None
    factor = (
        obj.compressible.current_factor
        + (instr.target_factor - obj.compressible.current_factor) * fraction
    )
    return scene.with_object(
        replace(obj, compressible=replace(obj.compressible, current_factor=factor))
    )


def execute_iter(
    batch: Sequence[Instruction], scene: Scene, step_count: int
) -> Iterator[tuple[RobotStatus, Scene]]:
    """Run a batch, yielding each status with the scene as of that moment.

    In-progress scenes carry interpolated motion for display; the done step
    assigns the exact target. Failed instructions leave their object
    untouched and execution continues.
    """
    if step_count < 1:
        raise ValueError("step_count must be >= 1")
    seqs = [i.seq for i in batch]
    if seqs != list(range(1, len(batch) + 1)):
        raise ValueError(f"batch seq numbers must be contiguous from 1, got {seqs}")

    for instr in batch:
        yield RobotStatus(seq=instr.seq, state=STATE_ACCEPTED), scene
        reason = validate(instr, scene)
        if reason is not None:
            yield RobotStatus(seq=instr.seq, state=STATE_FAILED, reason=reason), scene
            continue
        start = scene
        for i in range(1, step_count):
            fraction = i / step_count
            moving = _interpolate(instr, start, fraction)
            yield RobotStatus(seq=instr.seq, state=STATE_IN_PROGRESS, progress=fraction), moving
        scene = _apply(instr, start)
        yield RobotStatus(seq=instr.seq, state=STATE_DONE), scene


def execute_batch(
    batch: Sequence[Instruction], scene: Scene, step_count: int
) -> tuple[Scene, list[RobotStatus]]:
    log: list[RobotStatus] = []
    final = scene
    for status, snapshot in execute_iter(batch, scene, step_count):
        log.append(status)
        if status.state in (STATE_DONE, STATE_FAILED):
            final = snapshot
    return final, log


def check_status_order(log: Sequence[RobotStatus]) -> None:
    """Raise if any seq's statuses leave the accepted -> in_progress* -> end machine."""
    last: dict[int, str] = {}
    for status in log:
        prev = last.get(status.seq)
        if status.state == STATE_ACCEPTED:
            ok = prev is None
        elif status.state == STATE_IN_PROGRESS:
            ok = prev in (STATE_ACCEPTED, STATE_IN_PROGRESS)
        else:
            ok = prev in (STATE_ACCEPTED, STATE_IN_PROGRESS)
        if not ok:
            raise ValueError(f"seq {status.seq}: {prev} -> {status.state} is not a legal step")
        last[status.seq] = status.state
