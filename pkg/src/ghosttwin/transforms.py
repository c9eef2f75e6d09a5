"""Rigid-body math on plain float tuples: 3-vectors, unit quaternions, poses.

Everything here is pure and allocation-light so replay stays bit-reproducible.
Quaternions are (w, x, y, z). A pose maps local coordinates to world:
``world = rotate(orientation, local) + position``.
"""

from __future__ import annotations

import math

Vec3 = tuple[float, float, float]
Quat = tuple[float, float, float, float]

IDENTITY_QUAT: Quat = (1.0, 0.0, 0.0, 0.0)


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(a: Vec3, k: float) -> Vec3:
    return (a[0] * k, a[1] * k, a[2] * k)


def vdot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vcross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def vnorm(a: Vec3) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def vdist(a: Vec3, b: Vec3) -> float:
    return vnorm(vsub(a, b))


def vnormalize(a: Vec3) -> Vec3:
    n = vnorm(a)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


def vlerp(a: Vec3, b: Vec3, s: float) -> Vec3:
    return (
        a[0] + (b[0] - a[0]) * s,
        a[1] + (b[1] - a[1]) * s,
        a[2] + (b[2] - a[2]) * s,
    )


def qmul(a: Quat, b: Quat) -> Quat:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def qconj(q: Quat) -> Quat:
    return (q[0], -q[1], -q[2], -q[3])


def qnorm(q: Quat) -> float:
    return math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])


def qnormalize(q: Quat) -> Quat:
    n = qnorm(q)
    if n == 0.0:
        raise ValueError("cannot normalize zero quaternion")
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def qrotate(q: Quat, v: Vec3) -> Vec3:
    """Rotate vector v by unit quaternion q."""
    w, x, y, z = q
    # t = 2 * (q.xyz x v); v' = v + w*t + q.xyz x t
    tx = 2.0 * (y * v[2] - z * v[1])
    ty = 2.0 * (z * v[0] - x * v[2])
    tz = 2.0 * (x * v[1] - y * v[0])
    return (
        v[0] + w * tx + (y * tz - z * ty),
        v[1] + w * ty + (z * tx - x * tz),
        v[2] + w * tz + (x * ty - y * tx),
    )


def quat_from_axis_angle(axis: Vec3, angle: float) -> Quat:
    u = vnormalize(axis)
    h = 0.5 * angle
    s = math.sin(h)
    return (math.cos(h), u[0] * s, u[1] * s, u[2] * s)


def quat_between(a: Vec3, b: Vec3) -> Quat:
    """Shortest-arc rotation taking unit vector a onto unit vector b."""
    d = vdot(a, b)
    if d > 1.0 - 1e-12:
        return IDENTITY_QUAT
    if d < -1.0 + 1e-12:
        # 180 degrees: pick any axis orthogonal to a.
        ortho = (1.0, 0.0, 0.0) if abs(a[0]) < 0.9 else (0.0, 1.0, 0.0)
        axis = vnormalize(vcross(a, ortho))
        return (0.0, axis[0], axis[1], axis[2])
    c = vcross(a, b)
    q = (1.0 + d, c[0], c[1], c[2])
    return qnormalize(q)


def quat_angle(q: Quat) -> float:
    """Rotation angle of q in [0, pi]."""
    w = min(1.0, max(-1.0, abs(q[0]) / max(qnorm(q), 1e-300)))
    return 2.0 * math.acos(w)


def quat_twist(q: Quat, axis: Vec3) -> Quat:
    """Twist component of q about the unit axis (swing removed).

    If the rotation axis is orthogonal to `axis` the twist degenerates to
    the identity. A quaternion already equal to a pure twist is returned
    unchanged so repeated flattening is bit-stable.
    """
    w, x, y, z = q
    proj = x * axis[0] + y * axis[1] + z * axis[2]
    px, py, pz = proj * axis[0], proj * axis[1], proj * axis[2]
    if x == px and y == py and z == pz:
        return q
    n = math.sqrt(w * w + px * px + py * py + pz * pz)
    if n < 1e-12:
        return IDENTITY_QUAT
    return (w / n, px / n, py / n, pz / n)


def qnlerp(a: Quat, b: Quat, s: float) -> Quat:
    """Normalized linear interpolation, shortest path."""
    if a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] < 0.0:
        b = (-b[0], -b[1], -b[2], -b[3])
    m = (
        a[0] + (b[0] - a[0]) * s,
        a[1] + (b[1] - a[1]) * s,
        a[2] + (b[2] - a[2]) * s,
        a[3] + (b[3] - a[3]) * s,
    )
    return qnormalize(m)


def compose(pos_a: Vec3, quat_a: Quat, pos_b: Vec3, quat_b: Quat) -> tuple[Vec3, Quat]:
    """Compose transforms: result applies b first, then a."""
    return vadd(qrotate(quat_a, pos_b), pos_a), qmul(quat_a, quat_b)


def invert(pos: Vec3, quat: Quat) -> tuple[Vec3, Quat]:
    qi = qconj(quat)
    return vscale(qrotate(qi, pos), -1.0), qi


def relative(pos_a: Vec3, quat_a: Quat, pos_b: Vec3, quat_b: Quat) -> tuple[Vec3, Quat]:
    """Transform of b expressed in a's frame (a^-1 compose b)."""
    ip, iq = invert(pos_a, quat_a)
    return compose(ip, iq, pos_b, quat_b)
