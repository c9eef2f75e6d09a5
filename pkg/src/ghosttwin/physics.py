"""Quasi-static placement physics.

On release a ghost settles straight down onto the highest support top under
its footprint center (walkable anchor tops, other objects' tops, other
ghosts), with roll and pitch flattened. There are no dynamics: release
resolves instantaneously to a rest pose, and a lift pass guarantees the
result never penetrates a partially overlapped neighbor (it lands on top
of it instead — stacking).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .ghosts import GhostObject, effective_box
from .scene import BoxShape, Pose, Scene, object_world_box
from .transforms import (
    Vec3,
    qrotate,
    quat_twist,
    vadd,
    vcross,
    vdot,
    vnormalize,
    vscale,
    vsub,
)

RESTING_TOL = 1e-9
SUPPORT_EPS = 1e-9
CONTACT_EPS = 1e-9

_BASIS: tuple[Vec3, Vec3, Vec3] = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


class PlacementRejectedError(Exception):
    """Nothing can support the released ghost and the scene has no floor."""


# -- box overlap -----------------------------------------------------------


def _box_axes(pose: Pose) -> tuple[Vec3, Vec3, Vec3]:
    q = pose.orientation
    return (qrotate(q, _BASIS[0]), qrotate(q, _BASIS[1]), qrotate(q, _BASIS[2]))


def _interval_on_axis(
    axis: Vec3, pose: Pose, shape: BoxShape, axes: tuple[Vec3, Vec3, Vec3]
) -> tuple[float, float]:
    center = vdot(pose.position, axis)
    radius = sum(h * abs(vdot(a, axis)) for h, a in zip(shape.half_extents, axes))
    return center - radius, center + radius


def penetration_depth(
    pose_a: Pose, shape_a: BoxShape, pose_b: Pose, shape_b: BoxShape
) -> float:
    """Minimal translation distance separating two oriented boxes; 0 if disjoint.

    Evaluated over the 15 candidate separating axes (3 + 3 face normals and
    their 9 pairwise edge cross products).
    """
    axes_a = _box_axes(pose_a)
    axes_b = _box_axes(pose_b)
    candidates = list(axes_a) + list(axes_b)
    for u in axes_a:
        for v in axes_b:
            c = vcross(u, v)
            n = math.sqrt(vdot(c, c))
            if n > 1e-9:
                candidates.append((c[0] / n, c[1] / n, c[2] / n))

    depth = math.inf
    for axis in candidates:
        a_lo, a_hi = _interval_on_axis(axis, pose_a, shape_a, axes_a)
        b_lo, b_hi = _interval_on_axis(axis, pose_b, shape_b, axes_b)
        # Escape distance along +-axis. Plain interval overlap would
        # understate it when one projection contains the other.
        escape = min(a_hi - b_lo, b_hi - a_lo)
        if escape <= 0.0:
            return 0.0
        depth = min(depth, escape)
    return depth


# -- heights and footprints ------------------------------------------------


def _up_axis_index(up: Vec3) -> Optional[int]:
    for i in range(3):
        if abs(up[i]) == 1.0 and up[(i + 1) % 3] == 0.0 and up[(i + 2) % 3] == 0.0:
            return i
    return None


def horizontal_basis(up: Vec3) -> tuple[Vec3, Vec3]:
    """Deterministic orthonormal basis of the plane perpendicular to up."""
    i = _up_axis_index(up)
    if i is not None:
        return _BASIS[(i + 1) % 3], _BASIS[(i + 2) % 3]
    k = min(range(3), key=lambda j: abs(up[j]))
    e1 = vnormalize(vcross(up, _BASIS[k]))
    return e1, vcross(up, e1)


def _project2(p: Vec3, basis: tuple[Vec3, Vec3]) -> tuple[float, float]:
    return vdot(p, basis[0]), vdot(p, basis[1])


def set_height(pos: Vec3, up: Vec3, new_height: float) -> Vec3:
    """Move a point along up so its height becomes new_height (exact on axis-aligned up)."""
    i = _up_axis_index(up)
    if i is not None:
        out = list(pos)
        out[i] = new_height * up[i]
        return (out[0], out[1], out[2])
    return vadd(pos, vscale(up, new_height - vdot(pos, up)))


def box_height_interval(pose: Pose, shape: BoxShape, up: Vec3) -> tuple[float, float]:
    lo, hi = _interval_on_axis(up, pose, shape, _box_axes(pose))
    return lo, hi


@dataclass(frozen=True)
class TopFace:
    height: float  # highest corner of the face
    quad: tuple[tuple[float, float], ...]  # corners projected to the horizontal plane


def top_face(pose: Pose, shape: BoxShape, up: Vec3) -> TopFace:
    """The box face most aligned with up, as a support surface."""
    axes = _box_axes(pose)
    best_i, best_sign, best_dot = 0, 1.0, -math.inf
    for i in range(3):
        d = vdot(axes[i], up)
        for sign in (1.0, -1.0):
            if sign * d > best_dot:
                best_i, best_sign, best_dot = i, sign, sign * d
    j, k = (best_i + 1) % 3, (best_i + 2) % 3
    face_center = vadd(pose.position, vscale(axes[best_i], best_sign * shape.half_extents[best_i]))
    corners = []
    for sj, sk in ((-1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (1.0, -1.0)):
        offset = vadd(
            vscale(axes[j], sj * shape.half_extents[j]),
            vscale(axes[k], sk * shape.half_extents[k]),
        )
        corners.append(vadd(face_center, offset))
    basis = horizontal_basis(up)
    return TopFace(
        height=max(vdot(c, up) for c in corners),
        quad=tuple(_project2(c, basis) for c in corners),
    )


def point_in_convex_poly(pt: tuple[float, float], poly: Sequence[tuple[float, float]]) -> bool:
    """Point in (or on the boundary of) a convex polygon, either winding."""
    pos = neg = False
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        cross = (bx - ax) * (pt[1] - ay) - (by - ay) * (pt[0] - ax)
        if cross > RESTING_TOL:
            pos = True
        elif cross < -RESTING_TOL:
            neg = True
        if pos and neg:
            return False
    return True


def _convex_hull_2d(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(iterable):
        chain: list[tuple[float, float]] = []
        for p in iterable:
            while len(chain) >= 2:
                ox, oy = chain[-2]
                ax, ay = chain[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0.0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def _footprint_hull(pose: Pose, shape: BoxShape, up: Vec3) -> list[tuple[float, float]]:
    from .scene import world_corners

    basis = horizontal_basis(up)
    return _convex_hull_2d([_project2(c, basis) for c in world_corners(pose, shape)])


def _hulls_overlap(
    a: list[tuple[float, float]], b: list[tuple[float, float]], margin: float
) -> bool:
    """Separating-axis test on two convex hulls; touching within margin is not overlap."""
    if len(a) < 2 or len(b) < 2:
        return False

    def axes(poly):
        out = []
        n = len(poly)
        for i in range(n):
            ex = poly[(i + 1) % n][0] - poly[i][0]
            ey = poly[(i + 1) % n][1] - poly[i][1]
            norm = math.hypot(ex, ey)
            if norm > 1e-12:
                out.append((-ey / norm, ex / norm))
        return out

    for ax, ay in axes(a) + axes(b):
        a_proj = [ax * x + ay * y for x, y in a]
        b_proj = [ax * x + ay * y for x, y in b]
        if min(max(a_proj), max(b_proj)) - max(min(a_proj), min(b_proj)) <= margin:
            return False
    return True


# -- resting and settling ----------------------------------------------------


def resting_support(
    pose: Pose,
    shape: BoxShape,
    supports: Sequence[tuple[Pose, BoxShape]],
    up: Vec3,
) -> Optional[tuple[Pose, BoxShape]]:
    """The support the box rests on: bottom face coincident with the support
    top and footprint center over it. None when the box is not at rest."""
    bottom = box_height_interval(pose, shape, up)[0]
    basis = horizontal_basis(up)
    center2 = _project2(pose.position, basis)
    for sp, ss in supports:
        face = top_face(sp, ss, up)
        if abs(bottom - face.height) < RESTING_TOL and point_in_convex_poly(center2, face.quad):
            return (sp, ss)
    return None


def _support_boxes(
    scene: Scene, excluded_ids: set[str], ghosts: Sequence[GhostObject]
) -> tuple[list[tuple[Pose, BoxShape]], list[tuple[Pose, BoxShape]]]:
    """(supports, obstacles) around a settling ghost.

    Objects twinned by any live ghost are excluded: their ghosts stand in
    for where they will be. Non-walkable anchors block but do not support.
    """
    supports: list[tuple[Pose, BoxShape]] = []
    obstacles: list[tuple[Pose, BoxShape]] = []
    for a in scene.anchors:
        box = (a.pose, a.shape)
        obstacles.append(box)
        if a.walkable_top:
            supports.append(box)
    for o in scene.objects:
        if o.id in excluded_ids:
            continue
        box = object_world_box(o)
        supports.append(box)
        obstacles.append(box)
    for g in ghosts:
        box = effective_box(g, scene.object(g.object_id))
        supports.append(box)
        obstacles.append(box)
    return supports, obstacles


def settle(
    ghost: GhostObject, scene: Scene, other_ghosts: Sequence[GhostObject] = ()
) -> Pose:
    """Rest pose for a released ghost: straight drop, roll/pitch flattened.

    Support = highest candidate top under the footprint center at or below
    the release bottom; a ghost over a void falls back to the lowest
    walkable anchor. A final lift pass lands the ghost on top of anything
    it would otherwise sink into, keeping every pairwise overlap below the
    contact tolerance. Bit-stable under repetition.
    """
    up = scene.gravity_up
    obj = scene.object(ghost.object_id)
    flat_q = quat_twist(ghost.pose.orientation, up)
    flat = replace(ghost, pose=Pose(ghost.pose.position, flat_q))
    eff_pose, eff_shape = effective_box(flat, obj)

    # Corner offsets relative to the ghost pose position are constants of
    # (orientation, shape), so repeated settling recomputes identical heights.
    shift = vsub(eff_pose.position, flat.pose.position)
    hx, hy, hz = eff_shape.half_extents
    off_heights = []
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            for sz in (-1.0, 1.0):
                corner = vadd(shift, qrotate(flat_q, (sx * hx, sy * hy, sz * hz)))
                off_heights.append(vdot(corner, up))
    m_bottom = min(off_heights)
    height = max(off_heights) - m_bottom

    pos_h = vdot(flat.pose.position, up)
    bottom0 = pos_h + m_bottom

    excluded = {ghost.object_id} | {g.object_id for g in other_ghosts}
    supports, obstacles = _support_boxes(scene, excluded, other_ghosts)

    basis = horizontal_basis(up)
    center2 = _project2(eff_pose.position, basis)
    rest_h: Optional[float] = None
    for sp, ss in supports:
        face = top_face(sp, ss, up)
        if face.height <= bottom0 + SUPPORT_EPS and point_in_convex_poly(center2, face.quad):
            if rest_h is None or face.height > rest_h:
                rest_h = face.height
    if rest_h is None:
        floor_tops = [
            top_face(a.pose, a.shape, up).height for a in scene.anchors if a.walkable_top
        ]
        if not floor_tops:
            raise PlacementRejectedError(
                f"no support below ghost {ghost.object_id!r} and no walkable anchor"
            )
        rest_h = min(floor_tops)

    footprint = _footprint_hull(eff_pose, eff_shape, up)
    for _ in range(len(obstacles) + 1):
        conflict_tops = []
        for op, os_ in obstacles:
            o_lo, o_hi = box_height_interval(op, os_, up)
            if o_hi <= rest_h + CONTACT_EPS or o_lo >= rest_h + height - CONTACT_EPS:
                continue
            if _hulls_overlap(footprint, _footprint_hull(op, os_, up), CONTACT_EPS):
                conflict_tops.append(o_hi)
        if not conflict_tops:
            break
        rest_h = min(conflict_tops)

    new_pos = set_height(flat.pose.position, up, rest_h - m_bottom)
    return Pose(new_pos, flat_q)
