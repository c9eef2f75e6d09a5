"""Ray queries and lasso-volume containment.

A lasso volume is the generalized cone from the controller apex through a
closed boundary loop drawn on scene surfaces, capped at t_max. Containment
is decided on the unit sphere of directions around the apex: a point is
inside when the spherical winding number of the boundary loop around its
direction is nonzero, so boundaries spanning several non-coplanar surfaces
need no common plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .scene import BoxShape, Pose, Scene, world_corners
from .transforms import Vec3, qconj, qrotate, vadd, vdist, vnorm, vscale, vsub

RAY_DIRECTION_TOL = 1e-9
TIE_TOL = 1e-9
BOUNDARY_DISTINCT_TOL = 1e-6


@dataclass(frozen=True)
class Ray:
    origin: Vec3
    direction: Vec3  # unit

    def __post_init__(self):
        if abs(vnorm(self.direction) - 1.0) > RAY_DIRECTION_TOL:
            raise ValueError(f"ray direction must be unit length: {self.direction}")

    def at(self, t: float) -> Vec3:
        return vadd(self.origin, vscale(self.direction, t))


@dataclass(frozen=True)
class SurfaceHit:
    target_id: str
    t: float  # meters along the ray, >= 0
    point: Vec3


@dataclass(frozen=True)
class LassoVolume:
    apex: Vec3  # controller position at stroke end
    boundary: tuple[Vec3, ...]  # ordered loop of >= 3 surface points
    t_max: float  # depth cap, meters
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.boundary) < 3:
            raise ValueError("lasso boundary needs at least 3 points")
        if self.t_max <= 0.0:
            raise ValueError("lasso t_max must be positive")
        for i, p in enumerate(self.boundary):
            if vdist(p, self.apex) <= RAY_DIRECTION_TOL:
                raise ValueError(f"boundary point {i} coincides with the apex")
            for q in self.boundary[i + 1 :]:
                if vdist(p, q) <= BOUNDARY_DISTINCT_TOL:
                    raise ValueError("boundary points must be pairwise distinct")

    def _edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Unit boundary directions, per-edge cross/dot, and mean direction, cached."""
        cached = self._cache.get("edges")
        if cached is None:
            rel = np.asarray(self.boundary, dtype=np.float64) - np.asarray(
                self.apex, dtype=np.float64
            )
            dirs = rel / np.linalg.norm(rel, axis=1, keepdims=True)
            nxt = np.roll(dirs, -1, axis=0)
            mean = dirs.mean(axis=0)
            norm = np.linalg.norm(mean)
            mean = mean / norm if norm > 1e-12 else np.zeros(3)
            cached = (dirs, np.cross(dirs, nxt), np.einsum("ij,ij->i", dirs, nxt), mean)
            self._cache["edges"] = cached
        return cached


def ray_box_intersect(
    ray: Ray, pose: Pose, shape: BoxShape
) -> Optional[tuple[float, float]]:
    """Parametric interval where the ray passes through an oriented box.

    Returns (t_enter, t_exit) with t_exit >= t_enter >= 0, or None when the
    box is missed or lies entirely behind the origin. Rays starting inside
    report t_enter = 0.
    """
    inv = qconj(pose.orientation)
    o = qrotate(inv, vsub(ray.origin, pose.position))
    d = qrotate(inv, ray.direction)

    t_lo, t_hi = -math.inf, math.inf
    for axis in range(3):
        h = shape.half_extents[axis]
        if abs(d[axis]) < 1e-15:
            if abs(o[axis]) > h:
                return None
            continue
        t1 = (-h - o[axis]) / d[axis]
        t2 = (h - o[axis]) / d[axis]
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > t_lo:
            t_lo = t1
        if t2 < t_hi:
            t_hi = t2
        if t_lo > t_hi:
            return None
    if t_hi < 0.0:
        return None
    return (max(t_lo, 0.0), t_hi)


def _scan_targets(ray: Ray, scene: Scene) -> Optional[SurfaceHit]:
    hits: list[tuple[float, bool, str]] = []
    for a in scene.anchors:
        interval = ray_box_intersect(ray, a.pose, a.shape)
        if interval is not None:
            hits.append((interval[0], False, a.id))
    for o in scene.objects:
        interval = ray_box_intersect(ray, o.pose, o.shape)
        if interval is not None:
            hits.append((interval[0], True, o.id))
    if not hits:
        return None
    t_min = min(t for t, _, _ in hits)
    candidates = [h for h in hits if h[0] <= t_min + TIE_TOL]
    object_hits = [h for h in candidates if h[1]]
    pool = object_hits if object_hits else candidates
    t, _, target_id = min(pool, key=lambda h: (h[0], h[2]))
    return SurfaceHit(target_id=target_id, t=t, point=ray.at(t))


def first_hit(ray: Ray, scene: Scene) -> Optional[SurfaceHit]:
    """Nearest target along the ray; objects beat anchors on near-ties."""
    return _scan_targets(ray, scene)


def surface_hit_point(ray: Ray, scene: Scene) -> Optional[SurfaceHit]:
    """Entry point on the nearest surface of any kind (anchors are lasso canvases)."""
    return _scan_targets(ray, scene)


def _windings(volume: LassoVolume, query_dirs: np.ndarray) -> np.ndarray:
    """Spherical winding number of the boundary loop around each unit direction.

    For each loop edge (a, b) and query q, the azimuthal advance around q is
    atan2(q . (a x b), a . b - (q . a)(q . b)); the loop winding is the total
    advance over 2 pi. The azimuth sum alone cannot tell q from its antipode,
    so directions outside the boundary's hemisphere (the mirror cone behind
    the controller) are forced to zero.
    """
    dirs, cross, dots, mean = volume._edges()
    uq = dirs @ query_dirs.T  # (n, m)
    num = cross @ query_dirs.T
    den = dots[:, None] - uq * np.roll(uq, -1, axis=0)
    total = np.arctan2(num, den).sum(axis=0)
    winding = np.rint(total / (2.0 * math.pi)).astype(int)
    winding[query_dirs @ mean <= 0.0] = 0
    return winding


def point_in_lasso(point: Vec3, volume: LassoVolume) -> bool:
    """True iff the point lies inside the capped lasso cone (nonzero winding rule)."""
    d = vdist(point, volume.apex)
    if d <= 0.0 or d > volume.t_max:
        return False
    q = np.asarray(vsub(point, volume.apex), dtype=np.float64) / d
    return bool(_windings(volume, q[None, :])[0] != 0)


def box_probe_points(pose: Pose, shape: BoxShape) -> tuple[Vec3, ...]:
    """The 9 overlap probes: 8 world-space corners plus the center."""
    return world_corners(pose, shape) + (pose.position,)


def box_overlaps_lasso(pose: Pose, shape: BoxShape, volume: LassoVolume) -> bool:
    """True iff any of the box's 9 probe points falls inside the lasso volume.

    This probe rule is the definition of "overlap" for selection; it is a
    documented approximation of exact cone/box intersection.
    """
    probes = np.asarray(box_probe_points(pose, shape), dtype=np.float64)
    rel = probes - np.asarray(volume.apex, dtype=np.float64)
    dist = np.linalg.norm(rel, axis=1)
    in_range = (dist > 0.0) & (dist <= volume.t_max)
    if not in_range.any():
        return False
    dirs = rel[in_range] / dist[in_range, None]
    return bool((_windings(volume, dirs) != 0).any())
