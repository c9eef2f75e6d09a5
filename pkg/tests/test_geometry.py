"""Geometry checks against independent oracles: a point-marching ray oracle,
an exhaustive per-target scan, a planar point-in-polygon projection, and a
reimplementation of the 9-probe overlap rule via longitude winding."""

import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from ghosttwin.geometry import (
    LassoVolume,
    Ray,
    box_overlaps_lasso,
    box_probe_points,
    first_hit,
    point_in_lasso,
    ray_box_intersect,
    surface_hit_point,
)
from ghosttwin.scene import BoxShape, Pose, Scene, SurfaceAnchor, PhysicalObject

IDENT = (1.0, 0.0, 0.0, 0.0)


def make_pose(rng, span=2.0):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return Pose(tuple(rng.uniform(-span, span, size=3)), tuple(q))


def unit(v):
    v = np.asarray(v, dtype=float)
    return tuple(v / np.linalg.norm(v))


# -- oracles -----------------------------------------------------------------


def marching_interval(ray, pose, shape, t_hi=10.0, n=10_000):
    """First/last inside sample along the ray (independent local-frame test)."""
    rot = Rotation.from_quat(
        [pose.orientation[1], pose.orientation[2], pose.orientation[3], pose.orientation[0]]
    )
    ts = np.linspace(0.0, t_hi, n + 1)
    pts = np.asarray(ray.origin) + ts[:, None] * np.asarray(ray.direction)
    local = rot.inv().apply(pts - np.asarray(pose.position))
    inside = (np.abs(local) <= np.asarray(shape.half_extents) + 1e-12).all(axis=1)
    idx = np.flatnonzero(inside)
    if idx.size == 0:
        return None
    return ts[idx[0]], ts[idx[-1]]


from oracles import probe_overlap_oracle  # noqa: E402


# -- ray_box_intersect -------------------------------------------------------


def test_axis_aligned_hit():
    ray = Ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0))
    box = (Pose((0.0, 0.0, 5.0), IDENT), BoxShape((0.5, 0.5, 0.5)))
    assert ray_box_intersect(ray, *box) == (4.5, 5.5)


def test_disjoint_miss():
    ray = Ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0))
    box = (Pose((10.0, 0.0, 5.0), IDENT), BoxShape((0.5, 0.5, 0.5)))
    assert ray_box_intersect(ray, *box) is None


def test_ray_starting_inside_enters_at_zero():
    ray = Ray((0.0, 0.0, 5.0), (0.0, 0.0, 1.0))
    t_enter, t_exit = ray_box_intersect(ray, Pose((0.0, 0.0, 5.0), IDENT), BoxShape((0.5, 0.5, 0.5)))
    assert t_enter == 0.0 and t_exit == 5.5 - 5.0


def test_box_behind_origin_missed():
    ray = Ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0))
    assert ray_box_intersect(ray, Pose((0.0, 0.0, -5.0), IDENT), BoxShape((0.5, 0.5, 0.5))) is None


def test_random_rays_match_marching_oracle():
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 200:
        pose = make_pose(rng)
        shape = BoxShape(tuple(rng.uniform(0.2, 1.5, size=3)))
        origin = tuple(rng.uniform(-4, 4, size=3))
        # aim at a random interior point so most rays genuinely hit
        inside_local = rng.uniform(-0.9, 0.9, size=3) * np.asarray(shape.half_extents)
        rot = Rotation.from_quat(
            [pose.orientation[1], pose.orientation[2], pose.orientation[3], pose.orientation[0]]
        )
        target = rot.apply(inside_local) + np.asarray(pose.position)
        if np.linalg.norm(target - np.asarray(origin)) < 1e-6:
            continue
        ray = Ray(origin, unit(target - np.asarray(origin)))
        got = ray_box_intersect(ray, pose, shape)
        want = marching_interval(ray, pose, shape)
        assert got is not None and want is not None
        assert abs(got[0] - want[0]) < 1e-3
        assert abs(got[1] - want[1]) < 1e-3
        checked += 1


# -- first_hit / surface_hit_point --------------------------------------------


def two_cube_scene():
    objs = tuple(
        PhysicalObject(
            id=name,
            label=name,
            shape=BoxShape((0.5, 0.5, 0.5)),
            pose=Pose((0.0, 0.0, z), IDENT),
            default_pose=Pose((0.0, 0.0, z), IDENT),
            graspable=True,
        )
        for name, z in (("near", 5.0), ("far", 8.0))
    )
    floor = SurfaceAnchor(
        id="floor",
        label="floor",
        pose=Pose((0.0, -1.0, 0.0), IDENT),
        shape=BoxShape((20.0, 0.5, 20.0)),
        walkable_top=True,
    )
    return Scene(anchors=(floor,), objects=objs)


def test_first_hit_picks_nearer_cube():
    scene = two_cube_scene()
    hit = first_hit(Ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)), scene)
    assert hit is not None and hit.target_id == "near"
    assert hit.t == 4.5
    assert hit.point == (0.0, 0.0, 4.5)


def test_first_hit_miss_returns_none():
    scene = two_cube_scene()
    assert first_hit(Ray((0.0, 3.0, 0.0), (0.0, 1.0, 0.0)), scene) is None


def test_object_beats_anchor_on_tie():
    anchor = SurfaceAnchor(
        id="slab", label="slab", pose=Pose((0.0, 0.0, 5.0), IDENT),
        shape=BoxShape((0.5, 0.5, 0.5)), walkable_top=False,
    )
    obj = PhysicalObject(
        id="cube", label="cube", shape=BoxShape((0.5, 0.5, 0.5)),
        pose=Pose((0.0, 0.0, 5.0), IDENT), default_pose=Pose((0.0, 0.0, 5.0), IDENT),
        graspable=True,
    )
    scene = Scene(anchors=(anchor,), objects=(obj,))
    hit = first_hit(Ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)), scene)
    assert hit.target_id == "cube"


def test_exact_object_tie_breaks_by_id():
    objs = tuple(
        PhysicalObject(
            id=name, label=name, shape=BoxShape((0.5, 0.5, 0.5)),
            pose=Pose((x, 0.0, 5.0), IDENT), default_pose=Pose((x, 0.0, 5.0), IDENT),
            graspable=True,
        )
        for name, x in (("zed", 0.4), ("alpha", -0.4))
    )
    scene = Scene(anchors=(), objects=objs)
    hit = first_hit(Ray((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)), scene)
    assert hit.target_id == "alpha"


def test_first_hit_matches_exhaustive_oracle():
    rng = np.random.default_rng(43)
    for _ in range(300):
        n = rng.integers(2, 8)
        objs = []
        for i in range(n):
            pose = make_pose(rng, span=3.0)
            shape = BoxShape(tuple(rng.uniform(0.2, 1.0, size=3)))
            objs.append(
                PhysicalObject(
                    id=f"o{i}", label="o", shape=shape, pose=pose,
                    default_pose=pose, graspable=True,
                )
            )
        scene = Scene(anchors=(), objects=tuple(objs))
        ray = Ray(tuple(rng.uniform(-6, 6, size=3)), unit(rng.normal(size=3)))

        best = None
        for o in objs:
            interval = ray_box_intersect(ray, o.pose, o.shape)
            if interval is not None and (best is None or (interval[0], o.id) < best):
                best = (interval[0], o.id)
        hit = first_hit(ray, scene)
        if best is None:
            assert hit is None
        else:
            assert hit is not None and (hit.t, hit.target_id) == best


def test_surface_hit_point_straight_down_on_floor(room_scene):
    hit = surface_hit_point(Ray((0.0, 2.0, 0.0), (0.0, -1.0, 0.0)), room_scene)
    assert hit is not None and hit.target_id == "floor"
    assert np.allclose(hit.point, (0.0, 0.0, 0.0), atol=1e-12)


def test_surface_hit_prefers_sofa_over_floor(room_scene):
    hit = surface_hit_point(Ray((-2.2, 2.0, 0.0), (0.0, -1.0, 0.0)), room_scene)
    assert hit is not None and hit.target_id == "sofa"


def test_sweep_crosses_floor_sofa_floor(room_scene):
    # rays marching in x at y=2 looking down: floor, then the sofa, then floor
    ids = []
    for x in np.linspace(-3.5, -0.5, 31):
        hit = surface_hit_point(Ray((float(x), 2.0, 0.0), (0.0, -1.0, 0.0)), room_scene)
        assert hit is not None
        if not ids or ids[-1] != hit.target_id:
            ids.append(hit.target_id)
    assert ids == ["floor", "sofa", "floor"]


# -- point_in_lasso ------------------------------------------------------------


def square_volume():
    return LassoVolume(
        apex=(0.0, 2.0, 0.0),
        boundary=((1.0, 0.0, 1.0), (-1.0, 0.0, 1.0), (-1.0, 0.0, -1.0), (1.0, 0.0, -1.0)),
        t_max=5.0,
    )


def test_center_point_inside():
    assert point_in_lasso((0.0, 0.0, 0.0), square_volume()) is True


def test_far_point_outside():
    assert point_in_lasso((5.0, 0.0, 0.0), square_volume()) is False


def test_depth_cap_excludes_far_points():
    vol = square_volume()
    assert point_in_lasso((0.0, -10.0, 0.0), vol) is False  # beyond t_max along axis
    assert point_in_lasso((0.0, 2.0, 0.0), vol) is False  # the apex itself


def test_mirror_cone_behind_apex_excluded():
    # directly above the apex: the antipodal cone never selects
    vol = square_volume()
    assert point_in_lasso((0.0, 4.0, 0.0), vol) is False
    assert point_in_lasso((0.3, 3.5, -0.2), vol) is False


def test_volume_validation():
    with pytest.raises(ValueError):
        LassoVolume(apex=(0, 0, 0), boundary=((1, 0, 0), (0, 1, 0)), t_max=1.0)
    with pytest.raises(ValueError):
        LassoVolume(
            apex=(0.0, 0.0, 0.0),
            boundary=((1.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
            t_max=1.0,
        )


def random_convex_volume(rng):
    """Convex planar boundary: ellipse on a random plane, viewed from an apex."""
    n = int(rng.integers(5, 12))
    normal = unit(rng.normal(size=3))
    e1 = unit(np.cross(normal, [1.0, 0.0, 0.0] if abs(normal[0]) < 0.9 else [0.0, 1.0, 0.0]))
    e2 = np.cross(normal, e1)
    center = rng.uniform(-1, 1, size=3)
    ra, rb = rng.uniform(0.5, 1.5, size=2)
    thetas = np.sort(rng.uniform(0, 2 * np.pi, size=n))
    if np.min(np.diff(thetas, append=thetas[0] + 2 * np.pi)) < 0.05:
        return None
    boundary = tuple(
        tuple(center + ra * math.cos(t) * np.asarray(e1) + rb * math.sin(t) * e2)
        for t in thetas
    )
    apex = tuple(center + np.asarray(normal) * rng.uniform(1.5, 3.0) + rng.normal(scale=0.2, size=3))
    dists = [np.linalg.norm(np.asarray(b) - apex) for b in boundary]
    if min(dists) < 0.5:
        return None
    return LassoVolume(apex=apex, boundary=boundary, t_max=1.5 * max(dists)), (center, e1, e2, normal)


def planar_oracle(volume, plane, point):
    """Project the point from the apex onto the boundary plane, then 2D even-odd."""
    center, e1, e2, normal = plane
    apex = np.asarray(volume.apex)
    p = np.asarray(point)
    d = np.linalg.norm(p - apex)
    if d <= 0.0 or d > volume.t_max:
        return False, math.inf
    direction = (p - apex) / d
    denom = np.dot(direction, normal)
    if abs(denom) < 1e-9:
        return False, 0.0
    t = np.dot(np.asarray(center) - apex, normal) / denom
    if t <= 0.0:
        return False, math.inf
    hit = apex + t * direction
    px, py = np.dot(hit - center, e1), np.dot(hit - center, e2)
    poly = [
        (np.dot(np.asarray(b) - center, e1), np.dot(np.asarray(b) - center, e2))
        for b in volume.boundary
    ]
    inside = False
    margin = math.inf
    for i in range(len(poly)):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % len(poly)]
        if (ay > py) != (by > py):
            x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < x_cross:
                inside = not inside
        # distance from the projected point to this edge
        ex, ey = bx - ax, by - ay
        length2 = ex * ex + ey * ey
        s = max(0.0, min(1.0, ((px - ax) * ex + (py - ay) * ey) / length2))
        margin = min(margin, math.hypot(px - (ax + s * ex), py - (ay + s * ey)))
    return inside, margin


def test_point_in_lasso_matches_planar_oracle_on_convex_boundaries():
    rng = np.random.default_rng(44)
    tested = 0
    while tested < 10_000:
        made = random_convex_volume(rng)
        if made is None:
            continue
        volume, plane = made
        for _ in range(50):
            point = tuple(np.asarray(volume.apex) + rng.normal(size=3) * 1.5)
            want, margin = planar_oracle(volume, plane, point)
            if margin < 1e-3:  # skip points on the boundary cone
                continue
            assert point_in_lasso(point, volume) == want
            tested += 1
            if tested >= 10_000:
                break


def test_point_in_lasso_rotation_invariant():
    rng = np.random.default_rng(45)
    base = square_volume()
    points = [
        (0.0, 0.0, 0.0), (0.5, 0.5, 0.5), (2.0, 0.0, 0.0), (0.9, 0.0, 0.9),
        (-0.45, 1.0, 0.3), (3.0, -1.0, 0.0), (0.2, 3.5, 0.0),
    ]
    for _ in range(1000):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        rot = Rotation.from_quat([q[1], q[2], q[3], q[0]])
        vol_r = LassoVolume(
            apex=tuple(rot.apply(base.apex)),
            boundary=tuple(tuple(rot.apply(b)) for b in base.boundary),
            t_max=base.t_max,
        )
        for p in points:
            assert point_in_lasso(p, base) == point_in_lasso(tuple(rot.apply(p)), vol_r)


def test_point_in_lasso_scale_invariant_about_apex():
    rng = np.random.default_rng(46)
    vol = square_volume()
    apex = np.asarray(vol.apex)
    for _ in range(200):
        p = rng.uniform(-1.5, 1.5, size=3)
        d = np.linalg.norm(p - apex)
        if d < 1e-6:
            continue
        k = rng.uniform(0.05, vol.t_max / d)
        scaled_vol = LassoVolume(
            apex=vol.apex,
            boundary=tuple(tuple(apex + k * (np.asarray(b) - apex)) for b in vol.boundary),
            t_max=vol.t_max,
        )
        scaled_p = tuple(apex + k * (p - apex))
        assert point_in_lasso(tuple(p), vol) == point_in_lasso(scaled_p, scaled_vol)


# -- box_overlaps_lasso ---------------------------------------------------------


def test_block_under_generous_lasso():
    vol = square_volume()
    pose = Pose((0.0, 0.0, 0.0), IDENT)
    assert box_overlaps_lasso(pose, BoxShape((0.2, 0.2, 0.2)), vol) is True


def test_block_far_away_not_selected():
    vol = square_volume()
    pose = Pose((10.0, 0.0, 0.0), IDENT)
    assert box_overlaps_lasso(pose, BoxShape((0.2, 0.2, 0.2)), vol) is False


def test_probe_points_are_corners_plus_center():
    pose = Pose((1.0, 2.0, 3.0), IDENT)
    probes = box_probe_points(pose, BoxShape((0.5, 0.5, 0.5)))
    assert len(probes) == 9
    assert probes[-1] == (1.0, 2.0, 3.0)
    assert (0.5, 1.5, 2.5) in probes and (1.5, 2.5, 3.5) in probes


def test_overlap_matches_independent_probe_oracle():
    rng = np.random.default_rng(47)
    agree = 0
    while agree < 400:
        made = random_convex_volume(rng)
        if made is None:
            continue
        volume, _ = made
        pose = make_pose(rng, span=2.5)
        shape = BoxShape(tuple(rng.uniform(0.1, 0.8, size=3)))
        assert box_overlaps_lasso(pose, shape, volume) == probe_overlap_oracle(pose, shape, volume)
        agree += 1


def test_overlap_monotone_in_nested_lassos():
    rng = np.random.default_rng(48)
    apex = (0.0, 3.0, 0.0)
    for _ in range(100):
        n = int(rng.integers(4, 10))
        # star-shaped about the scaling center, so inner really nests in outer
        thetas = 2.0 * np.pi * (np.arange(n) + rng.uniform(0.15, 0.85, size=n)) / n
        radii = rng.uniform(0.6, 1.2, size=n)
        inner = tuple((radii[i] * math.cos(thetas[i]), 0.0, radii[i] * math.sin(thetas[i])) for i in range(n))
        outer = tuple((2.0 * p[0], 0.0, 2.0 * p[2]) for p in inner)
        vol_inner = LassoVolume(apex=apex, boundary=inner, t_max=12.0)
        vol_outer = LassoVolume(apex=apex, boundary=outer, t_max=12.0)
        pose = Pose((float(rng.uniform(-2, 2)), 0.0, float(rng.uniform(-2, 2))), IDENT)
        shape = BoxShape(tuple(rng.uniform(0.05, 0.4, size=3)))
        if box_overlaps_lasso(pose, shape, vol_inner):
            assert box_overlaps_lasso(pose, shape, vol_outer)
