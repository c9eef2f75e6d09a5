"""Arched trajectories to default poses and the snap-on-release test.

The trajectory is a quadratic Bezier whose control point lifts the chord
midpoint along up. Releasing a ghost with its center inside the corridor
tube around the arc teleports it exactly to its default pose.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .ghosts import PHASE_PLACED, GhostObject
from .scene import Scene
from .transforms import Vec3, vadd, vdist, vscale

CORRIDOR_RADIUS = 0.15  # meters around the arc within which release snaps
ARC_APEX_MIN = 0.3
ARC_APEX_FACTOR = 0.25
_COARSE_SAMPLES = 256
_TERNARY_ITERATIONS = 20


@dataclass(frozen=True)
class ArcTrajectory:
    p0: Vec3  # ghost center when the trajectory appeared
    pd: Vec3  # default pose center
    apex_height: float
    control: Vec3  # chord midpoint lifted by apex_height along up


def make_arc(
    p0: Vec3,
    pd: Vec3,
    up: Vec3,
    apex_min: float = ARC_APEX_MIN,
    apex_factor: float = ARC_APEX_FACTOR,
) -> ArcTrajectory:
    apex_height = max(apex_min, apex_factor * vdist(pd, p0))
    control = vadd(vscale(vadd(p0, pd), 0.5), vscale(up, apex_height))
    return ArcTrajectory(p0=p0, pd=pd, apex_height=apex_height, control=control)


def arc_point(arc: ArcTrajectory, t: float) -> Vec3:
    """Quadratic Bezier point; exact at the endpoints."""
    if t == 0.0:
        return arc.p0
    if t == 1.0:
        return arc.pd
    w0 = (1.0 - t) * (1.0 - t)
    w1 = 2.0 * t * (1.0 - t)
    w2 = t * t
    return (
        w0 * arc.p0[0] + w1 * arc.control[0] + w2 * arc.pd[0],
        w0 * arc.p0[1] + w1 * arc.control[1] + w2 * arc.pd[1],
        w0 * arc.p0[2] + w1 * arc.control[2] + w2 * arc.pd[2],
    )


def trajectory_polyline(arc: ArcTrajectory, n: int) -> list[Vec3]:
    if n < 2:
        raise ValueError("polyline needs at least 2 samples")
    return [arc_point(arc, i / (n - 1)) for i in range(n)]


def distance_to_arc(point: Vec3, arc: ArcTrajectory) -> tuple[float, float]:
    """(t_star, distance) of the closest curve point.

    Coarse-samples the parameter, then ternary-refines around every sampled
    local minimum (the squared distance is quartic in t, so a lone best
    sample can sit in the wrong basin).
    """
    n = _COARSE_SAMPLES
    ts = [i / n for i in range(n + 1)]
    ds = [vdist(point, arc_point(arc, t)) for t in ts]

    candidates = []
    for i in range(n + 1):
        left = ds[i - 1] if i > 0 else None
        right = ds[i + 1] if i < n else None
        if (left is None or ds[i] <= left) and (right is None or ds[i] <= right):
            candidates.append(i)

    best_t, best_d = 0.0, ds[0]
    for i in candidates:
        lo = ts[i - 1] if i > 0 else 0.0
        hi = ts[i + 1] if i < n else 1.0
        for _ in range(_TERNARY_ITERATIONS):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if vdist(point, arc_point(arc, m1)) <= vdist(point, arc_point(arc, m2)):
                hi = m2
            else:
                lo = m1
        t = 0.5 * (lo + hi)
        d = vdist(point, arc_point(arc, t))
        if d < best_d:
            best_t, best_d = t, d
    # Endpoints are exact; prefer them when the refined point is not closer.
    for t_end, d_end in ((0.0, ds[0]), (1.0, ds[n])):
        if d_end <= best_d:
            best_t, best_d = t_end, d_end
    return best_t, best_d


def should_snap(
    ghost_center: Vec3, arc: ArcTrajectory, corridor_radius: float = CORRIDOR_RADIUS
) -> bool:
    return distance_to_arc(ghost_center, arc)[1] <= corridor_radius


def snap(ghost: GhostObject, scene: Scene) -> GhostObject:
    """Teleport the ghost exactly to its default pose."""
    default = scene.object(ghost.object_id).default_pose
    return replace(ghost, pose=default, phase=PHASE_PLACED)


def set_default(ghost: GhostObject, scene: Scene) -> Scene:
    """Store the placed ghost's pose as its object's new default."""
    if ghost.phase != PHASE_PLACED:
        raise ValueError(
            f"cannot set default from a {ghost.phase} ghost; place it first"
        )
    obj = scene.object(ghost.object_id)
    return scene.with_object(replace(obj, default_pose=ghost.pose))
