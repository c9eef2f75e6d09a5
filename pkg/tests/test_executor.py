import math
from dataclasses import replace

import pytest

from ghosttwin.executor import check_status_order, execute_batch, execute_iter, validate
from ghosttwin.ghosts import PHASE_PLACED, spawn_ghosts
from ghosttwin.protocol import Instruction, compile_instructions
from ghosttwin.scene import Pose
from ghosttwin.selection import MODE_LASSO, SelectionResult


def pick(seq, oid, pose):
    return Instruction(seq=seq, kind="pick_and_place", object_id=oid, target_pose=pose)


def snapped_batch(scene, *ids):
    sel = SelectionResult(object_ids=tuple(ids), mode=MODE_LASSO)
    ghosts = [
        replace(g, pose=scene.object(g.object_id).default_pose, phase=PHASE_PLACED)
        for g in spawn_ghosts(sel, scene, group_id=1)
    ]
    return ghosts, compile_instructions(ghosts, scene)


# -- validate -------------------------------------------------------------------


def test_target_inside_anchor_is_penetration(room_scene):
    sofa = room_scene.anchor("sofa")
    instr = pick(1, "block_1", Pose(sofa.pose.position, (1.0, 0.0, 0.0, 0.0)))
    assert validate(instr, room_scene) == "penetration"


def test_target_inside_other_object_is_penetration(room_scene):
    other = room_scene.object("block_2")
    instr = pick(1, "block_1", other.pose)
    assert validate(instr, room_scene) == "penetration"


def test_floating_target_has_no_support(room_scene):
    instr = pick(1, "block_1", Pose((0.0, 1.5, 0.0), (1.0, 0.0, 0.0, 0.0)))
    assert validate(instr, room_scene) == "no support"


def test_fill_on_non_fillable_is_capability(room_scene):
    instr = Instruction(seq=1, kind="fill", object_id="block_1", target_level=0.5)
    assert validate(instr, room_scene) == "capability"


def test_compress_on_non_compressible_is_capability(room_scene):
    instr = Instruction(seq=1, kind="compress", object_id="block_1", target_factor=0.5)
    assert validate(instr, room_scene) == "capability"


def test_unknown_object(room_scene):
    instr = Instruction(seq=1, kind="fill", object_id="ghost_ship", target_level=0.5)
    assert validate(instr, room_scene) == "unknown object"


def test_tidy_batch_is_fully_feasible(room_scene):
    _, batch = snapped_batch(room_scene, *(f"block_{i}" for i in range(1, 7)))
    scene = room_scene
    for instr in batch:
        assert validate(instr, scene) is None
        scene, _ = execute_batch([replace(instr, seq=1)], scene, step_count=1)


# -- execute_batch ----------------------------------------------------------------


def test_status_schedule_for_one_instruction(room_scene):
    target = room_scene.object("block_1").default_pose
    scene, log = execute_batch([pick(1, "block_1", target)], room_scene, step_count=4)
    assert [(s.state, s.progress) for s in log] == [
        ("accepted", None),
        ("in_progress", 0.25),
        ("in_progress", 0.5),
        ("in_progress", 0.75),
        ("done", None),
    ]
    assert scene.object("block_1").pose == target  # exact, not accumulated lerp


def test_failed_instruction_isolated(room_scene):
    batch = [
        pick(1, "block_1", room_scene.object("block_1").default_pose),
        Instruction(seq=2, kind="fill", object_id="block_2", target_level=0.5),  # no capability
        pick(3, "block_3", room_scene.object("block_3").default_pose),
    ]
    scene, log = execute_batch(batch, room_scene, step_count=2)
    by_seq = {}
    for s in log:
        by_seq.setdefault(s.seq, []).append(s.state)
    assert by_seq[1][-1] == "done"
    assert by_seq[2] == ["accepted", "failed"]
    assert by_seq[3][-1] == "done"
    assert scene.object("block_2") == room_scene.object("block_2")  # untouched
    assert scene.object("block_1").pose == room_scene.object("block_1").default_pose


def test_non_contiguous_seq_rejected(room_scene):
    batch = [pick(2, "block_1", room_scene.object("block_1").default_pose)]
    with pytest.raises(ValueError):
        execute_batch(batch, room_scene, step_count=1)


def test_step_count_one_has_no_progress(room_scene):
    target = room_scene.object("block_1").default_pose
    _, log = execute_batch([pick(1, "block_1", target)], room_scene, step_count=1)
    assert [s.state for s in log] == ["accepted", "done"]


def test_untouched_objects_bit_identical(room_scene):
    _, batch = snapped_batch(room_scene, "block_1")
    scene, _ = execute_batch(batch, room_scene, step_count=3)
    for o in room_scene.objects:
        if o.id != "block_1":
            assert scene.object(o.id) == o


def test_tidy_scenario_converges(room_scene):
    ghosts, batch = snapped_batch(room_scene, *(f"block_{i}" for i in range(1, 7)))
    assert len(batch) == 6
    scene, log = execute_batch(batch, room_scene, step_count=4)
    check_status_order(log)
    done = [s for s in log if s.state == "done"]
    assert len(done) == 6
    for i in range(1, 7):
        assert scene.object(f"block_{i}").pose == room_scene.object(f"block_{i}").default_pose
    # convergence: real now equals ghost, so recompiling yields nothing
    assert compile_instructions(ghosts, scene) == ()


def test_fill_execution_sets_exact_level(room_scene):
    instr = Instruction(seq=1, kind="fill", object_id="bottle", target_level=0.6)
    scene, log = execute_batch([instr], room_scene, step_count=4)
    assert scene.object("bottle").fillable.fill_level == 0.6
    assert log[-1].state == "done"


def test_interpolated_motion_is_cosmetic(room_scene):
    target = room_scene.object("block_1").default_pose
    snapshots = list(execute_iter([pick(1, "block_1", target)], room_scene, step_count=4))
    start = room_scene.object("block_1").pose.position
    moving = [scene.object("block_1").pose.position for status, scene in snapshots
              if status.state == "in_progress"]
    for frac, pos in zip((0.25, 0.5, 0.75), moving):
        want = tuple(s + (t - s) * frac for s, t in zip(start, target.position))
        assert all(math.isclose(a, b, abs_tol=1e-12) for a, b in zip(pos, want))


def test_status_order_checker_rejects_bad_logs():
    from ghosttwin.protocol import RobotStatus

    with pytest.raises(ValueError):
        check_status_order([RobotStatus(seq=1, state="done")])
    with pytest.raises(ValueError):
        check_status_order(
            [
                RobotStatus(seq=1, state="accepted"),
                RobotStatus(seq=1, state="done"),
                RobotStatus(seq=1, state="in_progress", progress=0.5),
            ]
        )
