"""Regenerate the bundled golden fixtures.

Authors the demo room scene and the two scenario traces, replays them, and
freezes the resulting instruction logs. Run from the repo root:

    python scripts/make_goldens.py

Golden outputs are committed; tests compare bytes and independently verify
the frozen content, so regeneration is only needed when fixtures change.
"""

from __future__ import annotations

import json
import math
import pathlib
import sys

from ghosttwin.canonical import dumps as canon_dumps
from ghosttwin.scene import (
    BoxShape,
    FillState,
    PhysicalObject,
    Pose,
    Scene,
    SurfaceAnchor,
    save_scene,
    load_scene,
)
from ghosttwin.session import event_to_raw, ControllerEvent, replay
from ghosttwin.transforms import quat_between, vnormalize, vsub

GOLDEN_DIR = pathlib.Path(__file__).resolve().parent.parent / "src" / "ghosttwin" / "goldens"

IDENTITY = (1.0, 0.0, 0.0, 0.0)
UP = (0.0, 1.0, 0.0)

BLOCK_HALF = 0.06
BLOCK_GRID = {
    "block_1": (-0.25, -0.15),
    "block_2": (0.0, -0.15),
    "block_3": (0.25, -0.15),
    "block_4": (-0.25, 0.15),
    "block_5": (0.0, 0.15),
    "block_6": (0.25, 0.15),
}
BLOCK_JITTER = {
    "block_1": (0.02, 0.01),
    "block_2": (-0.015, 0.02),
    "block_3": (0.01, -0.02),
    "block_4": (-0.02, -0.01),
    "block_5": (0.015, 0.015),
    "block_6": (-0.01, 0.02),
}
CLUSTER = (1.1, 0.15)  # x, z of the scattered pile on the floor
BASKET_CENTER = (-1.2, 1.6)  # x, z of the basket platform
FLOOR_REST_Y = BLOCK_HALF  # block center height resting on the floor
BASKET_REST_Y = 0.1 + BLOCK_HALF  # resting on the basket platform top


def build_room() -> Scene:
    anchors = (
        SurfaceAnchor(
            id="floor",
            label="floor",
            pose=Pose((0.0, -0.05, 0.0), IDENTITY),
            shape=BoxShape((5.0, 0.05, 5.0)),
            walkable_top=True,
        ),
        SurfaceAnchor(
            id="sofa",
            label="sofa",
            pose=Pose((-2.2, 0.35, 0.0), IDENTITY),
            shape=BoxShape((0.5, 0.35, 1.0)),
            walkable_top=True,
        ),
        SurfaceAnchor(
            id="shelf",
            label="wall shelf",
            pose=Pose((2.5, 1.5, -2.0), IDENTITY),
            shape=BoxShape((0.4, 0.02, 0.6)),
            walkable_top=True,
        ),
        SurfaceAnchor(
            id="basket",
            label="basket",
            pose=Pose((BASKET_CENTER[0], 0.05, BASKET_CENTER[1]), IDENTITY),
            shape=BoxShape((0.45, 0.05, 0.35)),
            walkable_top=True,
        ),
    )
    objects = []
    for name in sorted(BLOCK_GRID):
        gx, gz = BLOCK_GRID[name]
        jx, jz = BLOCK_JITTER[name]
        start = Pose((CLUSTER[0] + gx + jx, FLOOR_REST_Y, CLUSTER[1] + gz + jz), IDENTITY)
        default = Pose(
            (BASKET_CENTER[0] + gx, BASKET_REST_Y, BASKET_CENTER[1] + gz), IDENTITY
        )
        objects.append(
            PhysicalObject(
                id=name,
                label="foam block",
                shape=BoxShape((BLOCK_HALF, BLOCK_HALF, BLOCK_HALF)),
                pose=start,
                default_pose=default,
                graspable=True,
            )
        )
    objects.append(
        PhysicalObject(
            id="bottle",
            label="soda bottle",
            shape=BoxShape((0.05, 0.15, 0.05)),
            pose=Pose((-1.0, 0.15, -1.0), IDENTITY),
            default_pose=Pose((-1.0, 0.15, -1.0), IDENTITY),
            graspable=True,
            fillable=FillState(fill_level=0.0, capacity_height=0.25),
        )
    )
    return Scene(anchors=anchors, objects=tuple(objects), gravity_up=UP)


def aim(origin, target) -> Pose:
    """Controller pose at origin with local -Z pointing at target."""
    direction = vnormalize(vsub(target, origin))
    return Pose(tuple(origin), quat_between((0.0, 0.0, -1.0), direction))


def pose_event(t, pose: Pose) -> dict:
    return event_to_raw(ControllerEvent(time=t, kind="pose_update", pose=pose))


def tidy_trace() -> list[dict]:
    """Lasso the six blocks, grab, carry to the basket, release in the
    corridor, commit."""
    apex = (1.1, 1.6, 0.15)
    events = []
    t = 0.0

    def circle_target(k: int, n: int = 24):
        theta = 2.0 * math.pi * k / n
        return (apex[0] + 0.55 * math.cos(theta), 0.0, apex[2] + 0.55 * math.sin(theta))

    events.append(pose_event(t, aim(apex, circle_target(0))))
    t = 0.01
    events.append({"t": t, "kind": "trigger_down"})
    for k in range(1, 24):
        t = round(0.01 + 0.01 * k, 4)
        events.append(pose_event(t, aim(apex, circle_target(k))))
    t = 0.26
    events.append({"t": t, "kind": "trigger_up"})

    # Grab the central block of the pile.
    scene = build_room()
    anchor_block = scene.object("block_5")
    grab_pose = aim(apex, anchor_block.pose.position)
    events.append(pose_event(0.30, grab_pose))
    events.append({"t": 0.31, "kind": "trigger_down"})

    # Straight carry: when the anchor block reaches its default, every
    # block is within the jitter spread (<= ~0.05 m) of its own default.
    delta = vsub(anchor_block.default_pose.position, anchor_block.pose.position)
    for i in range(1, 11):
        s = i / 10.0
        pos = (
            apex[0] + delta[0] * s,
            apex[1] + delta[1] * s,
            apex[2] + delta[2] * s,
        )
        events.append(pose_event(round(0.31 + 0.05 * i, 4), Pose(pos, grab_pose.orientation)))
    events.append({"t": 0.85, "kind": "trigger_up"})
    events.append({"t": 0.9, "kind": "menu", "action": "commit"})
    return events


def fill_trace() -> list[dict]:
    """Click-select the bottle, drag its fill level up, commit."""
    origin = (-1.0, 1.2, 0.2)
    bottle = (-1.0, 0.15, -1.0)
    events = [pose_event(0.0, aim(origin, bottle))]
    events.append({"t": 0.01, "kind": "trigger_down"})
    events.append({"t": 0.02, "kind": "trigger_up"})
    events.append({"t": 0.05, "kind": "menu", "action": "begin_fill"})
    q = aim(origin, bottle).orientation
    for i in range(1, 6):
        y = 1.2 + 0.03 * i  # 0.15 m of travel = 0.6 of the 0.25 m capacity
        events.append(pose_event(round(0.05 + 0.05 * i, 4), Pose((-1.0, y, 0.2), q)))
    events.append({"t": 0.35, "kind": "menu", "action": "end_fill"})
    events.append({"t": 0.4, "kind": "menu", "action": "commit"})
    return events


def write_trace(path: pathlib.Path, events: list[dict]) -> None:
    path.write_text("".join(canon_dumps(e) + "\n" for e in events), encoding="utf-8")


def main() -> int:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    scene = build_room()
    scene_text = save_scene(scene)
    load_scene(scene_text)  # fails loudly if the fixture breaks an invariant
    (GOLDEN_DIR / "room_tidy.json").write_text(scene_text, encoding="utf-8")

    write_trace(GOLDEN_DIR / "tidy_trace.jsonl", tidy_trace())
    write_trace(GOLDEN_DIR / "fill_trace.jsonl", fill_trace())

    for name in ("tidy", "fill"):
        trace_text = (GOLDEN_DIR / f"{name}_trace.jsonl").read_text(encoding="utf-8")
        result = replay(scene_text, trace_text)
        if result.warnings:
            print(f"{name}: unexpected warnings: {result.warnings}", file=sys.stderr)
            return 1
        out = GOLDEN_DIR / f"{name}_instructions.jsonl"
        out.write_text(result.instruction_text, encoding="utf-8")
        print(f"{name}: {len(result.instruction_text.splitlines())} instructions, digest {result.digest[:12]}")

    cases = [
        {
            "name": "tidy",
            "scene": "room_tidy.json",
            "trace": "tidy_trace.jsonl",
            "expected": "tidy_instructions.jsonl",
        },
        {
            "name": "fill",
            "scene": "room_tidy.json",
            "trace": "fill_trace.jsonl",
            "expected": "fill_instructions.jsonl",
        },
    ]
    (GOLDEN_DIR / "cases.json").write_text(
        json.dumps(cases, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"goldens written to {GOLDEN_DIR}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
