import math

import pytest

from ghosttwin.geometry import Ray, box_overlaps_lasso
from ghosttwin.selection import (
    MODE_EMPTY,
    MODE_LASSO,
    MODE_SINGLE,
    Stroke,
    begin_stroke,
    end_stroke,
    extend_stroke,
)
from ghosttwin.transforms import vnormalize, vsub


def aim_ray(origin, target):
    return Ray(tuple(origin), vnormalize(vsub(tuple(target), tuple(origin))))


def circle_stroke(scene, center, radius, apex_height=1.6, n=32):
    apex = (center[0], apex_height, center[1])
    def target(k):
        theta = 2.0 * math.pi * k / n
        return (center[0] + radius * math.cos(theta), 0.0, center[1] + radius * math.sin(theta))
    stroke = begin_stroke(aim_ray(apex, target(0)), 0.0, scene)
    for k in range(1, n):
        stroke = extend_stroke(stroke, aim_ray(apex, target(k)), k * 0.01, scene)
    return stroke


def test_begin_stroke_on_floor_has_point(room_scene):
    stroke = begin_stroke(aim_ray((0, 1.5, 0), (0, 0, 0)), 0.0, room_scene)
    assert len(stroke.samples) == 1
    assert stroke.samples[0].surface_point is not None


def test_begin_stroke_at_sky_has_no_point(room_scene):
    stroke = begin_stroke(Ray((0.0, 1.5, 0.0), (0.0, 1.0, 0.0)), 0.0, room_scene)
    assert len(stroke.samples) == 1
    assert stroke.samples[0].surface_point is None


def test_extend_adds_boundary_candidate_on_hit(room_scene):
    stroke = begin_stroke(aim_ray((0, 1.5, 0), (0, 0, 0)), 0.0, room_scene)
    before = len(stroke.surface_points())
    stroke = extend_stroke(stroke, aim_ray((0, 1.5, 0), (0.5, 0, 0)), 0.1, room_scene)
    assert len(stroke.surface_points()) == before + 1


def test_extend_miss_keeps_sample_but_not_candidate(room_scene):
    stroke = begin_stroke(aim_ray((0, 1.5, 0), (0, 0, 0)), 0.0, room_scene)
    stroke = extend_stroke(stroke, Ray((0.0, 1.5, 0.0), (0.0, 1.0, 0.0)), 0.1, room_scene)
    assert len(stroke.samples) == 2
    assert len(stroke.surface_points()) == 1


def test_out_of_order_extension_rejected(room_scene):
    stroke = begin_stroke(aim_ray((0, 1.5, 0), (0, 0, 0)), 1.0, room_scene)
    with pytest.raises(ValueError):
        extend_stroke(stroke, aim_ray((0, 1.5, 0), (0.5, 0, 0)), 0.5, room_scene)


def test_fifty_sample_sweep_collects_candidates(room_scene):
    stroke = circle_stroke(room_scene, (1.1, 0.15), 0.55, n=50)
    assert len(stroke.surface_points()) == 50


def test_click_on_block_single_selects(room_scene):
    block = room_scene.object("block_2")
    stroke = begin_stroke(aim_ray((1.1, 1.6, 0.15), block.pose.position), 0.0, room_scene)
    result = end_stroke(stroke, room_scene)
    assert result.mode == MODE_SINGLE
    assert result.object_ids == ("block_2",)


def test_click_on_anchor_is_empty(room_scene):
    stroke = begin_stroke(aim_ray((0, 1.6, 0), (0, 0, 0)), 0.0, room_scene)
    result = end_stroke(stroke, room_scene)
    assert result.mode == MODE_EMPTY and result.object_ids == ()


def test_stroke_in_the_sky_is_empty(room_scene):
    stroke = begin_stroke(Ray((0.0, 1.5, 0.0), (0.0, 1.0, 0.0)), 0.0, room_scene)
    for i in range(1, 6):
        direction = vnormalize((0.1 * i, 1.0, 0.0))
        stroke = extend_stroke(stroke, Ray((0.0, 1.5, 0.0), direction), i * 0.01, room_scene)
    result = end_stroke(stroke, room_scene)
    assert result.mode == MODE_EMPTY and result.object_ids == ()


def test_sub_threshold_path_is_still_a_click(room_scene):
    # 5 samples wiggling within 2 cm of surface path select like the first ray
    block = room_scene.object("block_2")
    apex = (1.1, 1.6, 0.15)
    stroke = begin_stroke(aim_ray(apex, block.pose.position), 0.0, room_scene)
    for i in range(1, 5):
        target = (block.pose.position[0] + 0.002 * i, 0.0, block.pose.position[2])
        stroke = extend_stroke(stroke, aim_ray(apex, target), i * 0.01, room_scene)
    result = end_stroke(stroke, room_scene)
    assert result.mode == MODE_SINGLE
    assert result.object_ids == ("block_2",)


def test_lasso_selects_enclosed_blocks(room_scene):
    stroke = circle_stroke(room_scene, (1.1, 0.15), 0.55)
    result = end_stroke(stroke, room_scene)
    assert result.mode == MODE_LASSO
    assert result.object_ids == tuple(sorted(f"block_{i}" for i in range(1, 7)))
    # verify against the probe rule applied directly
    want = sorted(
        o.id
        for o in room_scene.objects
        if box_overlaps_lasso(o.pose, o.shape, result.volume)
    )
    assert list(result.object_ids) == want


def test_small_lasso_selects_subset(room_scene):
    # a tight loop around block_5 only
    block = room_scene.object("block_5")
    center = (block.pose.position[0], block.pose.position[2])
    stroke = circle_stroke(room_scene, center, 0.14)
    result = end_stroke(stroke, room_scene)
    assert result.mode == MODE_LASSO
    assert result.object_ids == ("block_5",)


def test_selection_is_deterministic(room_scene):
    stroke = circle_stroke(room_scene, (1.1, 0.15), 0.55)
    a = end_stroke(stroke, room_scene)
    b = end_stroke(stroke, room_scene)
    assert a.object_ids == b.object_ids and a.mode == b.mode


def test_boundary_downsampling_respects_spacing(room_scene):
    stroke = circle_stroke(room_scene, (1.1, 0.15), 0.55, n=400)  # ~9 mm steps
    result = end_stroke(stroke, room_scene)
    boundary = result.volume.boundary
    for a, b in zip(boundary, boundary[1:]):
        assert math.dist(a, b) >= 0.01 - 1e-12


def test_stroke_requires_samples():
    with pytest.raises(ValueError):
        Stroke(samples=())
