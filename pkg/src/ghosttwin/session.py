"""The authoring session: a deterministic state machine over controller events.

One totally ordered event stream drives everything: strokes select, grabs
carry ghost groups, releases snap or settle, menu actions deform, redefine
defaults, and commit instruction batches. Malformed human traces produce
warnings, never crashes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from typing import Optional

from . import canonical
from .config import EngineConfig
from .geometry import Ray, ray_box_intersect
from .ghosts import (
    PHASE_GRABBED,
    PHASE_PLACED,
    GhostObject,
    GrabState,
    effective_box,
    grab as grab_group,
    move as move_group,
    set_fill_by_drag,
    spawn_ghosts,
)
from .physics import settle
from .protocol import Instruction, compile_instructions, encode_lines
from .scene import Pose, Scene, load_scene, scene_to_raw
from .selection import Stroke, begin_stroke, end_stroke, extend_stroke
from .snap import ArcTrajectory, make_arc, should_snap, snap, set_default
from .transforms import qrotate, vdot, vnormalize

EVENT_POSE = "pose_update"
EVENT_TRIGGER_DOWN = "trigger_down"
EVENT_TRIGGER_UP = "trigger_up"
EVENT_MENU = "menu"

ACTION_SET_DEFAULT = "set_default"
ACTION_BEGIN_FILL = "begin_fill"
ACTION_END_FILL = "end_fill"
ACTION_COMMIT = "commit"
_ACTIONS = {ACTION_SET_DEFAULT, ACTION_BEGIN_FILL, ACTION_END_FILL, ACTION_COMMIT}

MODE_IDLE = "idle"
MODE_SELECTING = "selecting"
MODE_MANIPULATING = "manipulating"
MODE_FILLING = "filling"


class TraceParseError(ValueError):
    """Malformed trace line."""


@dataclass(frozen=True)
class ControllerEvent:
    time: float
    kind: str
    pose: Optional[Pose] = None
    action: Optional[str] = None


def parse_event(raw: dict) -> ControllerEvent:
    if not isinstance(raw, dict):
        raise TraceParseError("event must be a JSON object")
    allowed = {"t", "kind", "pose", "action"}
    unknown = set(raw) - allowed
    if unknown:
        raise TraceParseError(f"unknown event fields {sorted(unknown)}")
    if not isinstance(raw.get("t"), (int, float)) or isinstance(raw.get("t"), bool):
        raise TraceParseError("event needs a numeric time t")
    kind = raw.get("kind")
    if kind not in (EVENT_POSE, EVENT_TRIGGER_DOWN, EVENT_TRIGGER_UP, EVENT_MENU):
        raise TraceParseError(f"unknown event kind {kind!r}")
    pose = None
    if kind == EVENT_POSE:
        praw = raw.get("pose")
        if (
            not isinstance(praw, dict)
            or set(praw) != {"position", "orientation"}
            or len(praw.get("position", [])) != 3
            or len(praw.get("orientation", [])) != 4
        ):
            raise TraceParseError("pose_update needs pose {position:[3], orientation:[4]}")
        pose = Pose(
            tuple(float(c) for c in praw["position"]),  # type: ignore[arg-type]
            tuple(float(c) for c in praw["orientation"]),  # type: ignore[arg-type]
        )
    elif "pose" in raw:
        raise TraceParseError(f"{kind} carries no pose")
    action = None
    if kind == EVENT_MENU:
        action = raw.get("action")
        if action not in _ACTIONS:
            raise TraceParseError(f"unknown menu action {action!r}")
    elif "action" in raw:
        raise TraceParseError(f"{kind} carries no action")
    return ControllerEvent(time=float(raw["t"]), kind=kind, pose=pose, action=action)


def event_to_raw(event: ControllerEvent) -> dict:
    raw: dict = {"t": event.time, "kind": event.kind}
    if event.pose is not None:
        raw["pose"] = {
            "position": list(event.pose.position),
            "orientation": list(event.pose.orientation),
        }
    if event.action is not None:
        raw["action"] = event.action
    return raw


def parse_trace(text: str) -> list[ControllerEvent]:
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(parse_event(json.loads(line)))
        except (json.JSONDecodeError, TraceParseError) as exc:
            raise TraceParseError(f"trace line {lineno}: {exc}") from exc
    return events


def controller_ray(pose: Pose) -> Ray:
    """Controller forward is local -Z."""
    return Ray(pose.position, vnormalize(qrotate(pose.orientation, (0.0, 0.0, -1.0))))


class Session:
    """Single-owner event loop state. Never share across threads."""

    def __init__(self, scene: Scene, config: EngineConfig = EngineConfig()):
        self.scene = scene
        self.config = config
        self.ghosts: dict[str, GhostObject] = {}
        self.selection: tuple[str, ...] = ()
        self.stroke: Optional[Stroke] = None
        self.grab: Optional[GrabState] = None
        self.arcs: dict[str, ArcTrajectory] = {}
        self.mode: str = MODE_IDLE
        self.controller: Optional[Pose] = None
        self.fill_target: Optional[tuple[str, float, float]] = None  # id, start_y, start_level
        self.group_counter: int = 0
        self.batches: list[tuple[Instruction, ...]] = []
        self.warnings: list[str] = []
        self.last_selection = None  # most recent SelectionResult, for display
        self._last_time: Optional[float] = None

    # -- helpers ----------------------------------------------------------

    def _warn(self, event: ControllerEvent, message: str) -> list[str]:
        self.warnings.append(f"t={event.time:g}: {message}")
        return ["warning"]

    def _selected_ghosts(self) -> list[GhostObject]:
        return [self.ghosts[i] for i in self.selection if i in self.ghosts]

    def _pointed_selected_ghost(self, ray: Ray) -> Optional[str]:
        best: Optional[tuple[float, str]] = None
        for g in self._selected_ghosts():
            pose, shape = effective_box(g, self.scene.object(g.object_id))
            interval = ray_box_intersect(ray, pose, shape)
            if interval is None:
                continue
            key = (interval[0], g.object_id)
            if best is None or key < best:
                best = key
        return best[1] if best else None

    # -- the state machine --------------------------------------------------

    def step(self, event: ControllerEvent) -> list[str]:
        """Apply one event; returns effect tags for transports to broadcast."""
        if self._last_time is not None and event.time < self._last_time:
            return self._warn(event, "event time went backwards; ignored")
        self._last_time = event.time

        if event.kind == EVENT_POSE:
            return self._on_pose(event)
        if event.kind == EVENT_TRIGGER_DOWN:
            return self._on_trigger_down(event)
        if event.kind == EVENT_TRIGGER_UP:
            return self._on_trigger_up(event)
        return self._on_menu(event)

    def _on_pose(self, event: ControllerEvent) -> list[str]:
        assert event.pose is not None
        self.controller = event.pose
        if self.mode == MODE_SELECTING:
            assert self.stroke is not None
            if event.time <= self.stroke.samples[-1].time:
                return self._warn(event, "stroke sample out of order; ignored")
            self.stroke = extend_stroke(
                self.stroke, controller_ray(event.pose), event.time, self.scene
            )
            return ["stroke"]
        if self.mode == MODE_MANIPULATING:
            assert self.grab is not None
            moved = move_group(self.grab, self._selected_ghosts(), event.pose)
            for g in moved:
                self.ghosts[g.object_id] = g
            return ["ghosts"]
        if self.mode == MODE_FILLING:
            assert self.fill_target is not None
            ghost_id, start_y, start_level = self.fill_target
            ghost = self.ghosts[ghost_id]
            level = set_fill_by_drag(
                ghost,
                self.scene,
                start_y,
                vdot(event.pose.position, self.scene.gravity_up),
                start_level,
            )
            self.ghosts[ghost_id] = replace(ghost, fill_level=level)
            return ["ghosts"]
        return []

    def _on_trigger_down(self, event: ControllerEvent) -> list[str]:
        if self.mode != MODE_IDLE:
            return self._warn(event, f"trigger_down while {self.mode}; ignored")
        if self.controller is None:
            return self._warn(event, "trigger_down before any pose_update; ignored")
        ray = controller_ray(self.controller)

        pointed = self._pointed_selected_ghost(ray) if self.selection else None
        if pointed is not None:
            group = self._selected_ghosts()
            self.grab, grabbed = grab_group(group, self.controller, pointed)
            up = self.scene.gravity_up
            for g in grabbed:
                self.ghosts[g.object_id] = g
                default = self.scene.object(g.object_id).default_pose
                self.arcs[g.object_id] = make_arc(
                    g.pose.position,
                    default.position,
                    up,
                    apex_min=self.config.arc_apex_min,
                    apex_factor=self.config.arc_apex_factor,
                )
            self.mode = MODE_MANIPULATING
            return ["ghosts", "arcs"]

        self.stroke = begin_stroke(ray, event.time, self.scene)
        self.mode = MODE_SELECTING
        return ["stroke"]

    def _on_trigger_up(self, event: ControllerEvent) -> list[str]:
        if self.mode == MODE_SELECTING:
            assert self.stroke is not None
            result = end_stroke(
                self.stroke,
                self.scene,
                click_threshold=self.config.click_threshold,
                boundary_spacing=self.config.lasso_spacing,
                t_max_factor=self.config.t_max_factor,
            )
            self.stroke = None
            self.mode = MODE_IDLE
            self.selection = result.object_ids
            self.last_selection = result
            if result.object_ids:
                self.group_counter += 1
                fresh = [i for i in result.object_ids if i not in self.ghosts]
                if fresh:
                    subset = replace(result, object_ids=tuple(fresh))
                    for g in spawn_ghosts(subset, self.scene, self.group_counter):
                        self.ghosts[g.object_id] = g
                for i in result.object_ids:
                    self.ghosts[i] = replace(self.ghosts[i], group_id=self.group_counter)
            return ["selection", "ghosts"]

        if self.mode == MODE_MANIPULATING:
            assert self.grab is not None
            for ghost_id in self.selection:
                ghost = self.ghosts[ghost_id]
                arc = self.arcs.get(ghost_id)
                if arc is not None and should_snap(
                    ghost.pose.position, arc, self.config.corridor_radius
                ):
                    self.ghosts[ghost_id] = snap(ghost, self.scene)
                else:
                    others = [g for i, g in self.ghosts.items() if i != ghost_id]
                    pose = settle(ghost, self.scene, others)
                    self.ghosts[ghost_id] = replace(ghost, pose=pose, phase=PHASE_PLACED)
            self.grab = None
            self.arcs = {}
            self.mode = MODE_IDLE
            return ["ghosts", "arcs"]

        return self._warn(event, f"trigger_up while {self.mode}; ignored")

    def _on_menu(self, event: ControllerEvent) -> list[str]:
        action = event.action
        if action == ACTION_COMMIT:
            if any(g.phase == PHASE_GRABBED for g in self.ghosts.values()):
                return self._warn(event, "commit while a ghost is grabbed; ignored")
            batch = compile_instructions(list(self.ghosts.values()), self.scene)
            self.batches.append(batch)
            return ["instructions"]

        if action == ACTION_SET_DEFAULT:
            if self.mode != MODE_IDLE:
                return self._warn(event, f"set_default while {self.mode}; ignored")
            changed = False
            for ghost in self._selected_ghosts():
                if ghost.phase != PHASE_PLACED:
                    self._warn(event, f"set_default on {ghost.phase} ghost {ghost.object_id!r}")
                    continue
                self.scene = set_default(ghost, self.scene)
                changed = True
            return ["scene"] if changed else ["warning"]

        if action == ACTION_BEGIN_FILL:
            if self.mode != MODE_IDLE:
                return self._warn(event, f"begin_fill while {self.mode}; ignored")
            if self.controller is None:
                return self._warn(event, "begin_fill before any pose_update; ignored")
            if len(self.selection) != 1:
                return self._warn(event, "begin_fill needs exactly one selected ghost")
            ghost = self.ghosts[self.selection[0]]
            obj = self.scene.object(ghost.object_id)
            if obj.fillable is None:
                return self._warn(event, f"object {ghost.object_id!r} is not fillable")
            start_y = vdot(self.controller.position, self.scene.gravity_up)
            level = ghost.fill_level if ghost.fill_level is not None else 0.0
            self.fill_target = (ghost.object_id, start_y, level)
            self.mode = MODE_FILLING
            return ["mode"]

        if action == ACTION_END_FILL:
            if self.mode != MODE_FILLING:
                return self._warn(event, "end_fill while not filling; ignored")
            self.fill_target = None
            self.mode = MODE_IDLE
            return ["mode"]

        return self._warn(event, f"unknown menu action {action!r}")

    # -- snapshots ----------------------------------------------------------

    def state_raw(self) -> dict:
        """Canonical JSON-ready digest source of the full session state."""
        return {
            "scene": scene_to_raw(self.scene),
            "ghosts": [ghost_to_raw(self.ghosts[i]) for i in sorted(self.ghosts)],
            "selection": list(self.selection),
            "mode": self.mode,
            "batches": len(self.batches),
            "warnings": list(self.warnings),
        }

    def digest(self) -> str:
        return hashlib.sha256(canonical.dumps(self.state_raw()).encode()).hexdigest()


def ghost_to_raw(ghost: GhostObject) -> dict:
    raw: dict = {
        "object_id": ghost.object_id,
        "pose": {
            "position": list(ghost.pose.position),
            "orientation": list(ghost.pose.orientation),
        },
        "phase": ghost.phase,
        "group_id": ghost.group_id,
    }
    if ghost.fill_level is not None:
        raw["fill_level"] = ghost.fill_level
    if ghost.height_factor is not None:
        raw["height_factor"] = ghost.height_factor
    return raw


@dataclass(frozen=True)
class ReplayResult:
    instruction_text: str  # newline-delimited instruction lines of every commit
    digest: str
    session: Session
    warnings: tuple[str, ...]


def replay(scene_text: str, trace_text: str, config: EngineConfig = EngineConfig()) -> ReplayResult:
    """Pure function of (scene bytes, trace bytes, config) to output bytes."""
    scene = load_scene(scene_text)
    events = parse_trace(trace_text)
    session = Session(scene, config)
    for event in events:
        session.step(event)
    text = "".join(encode_lines(batch) for batch in session.batches)
    return ReplayResult(
        instruction_text=text,
        digest=session.digest(),
        session=session,
        warnings=tuple(session.warnings),
    )
