"""Independent oracle implementations shared by module and acceptance tests.

These deliberately re-derive results by a different route than the engine:
scipy rotations for corner transforms, pole-rotation longitude sums for
lasso winding, and dense parameter scans for curve distance.
"""

import numpy as np
from scipy.spatial.transform import Rotation

_GRID_CACHE: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _weights(n: int):
    cached = _GRID_CACHE.get(n)
    if cached is None:
        t = np.linspace(0.0, 1.0, n + 1)
        cached = ((1.0 - t) ** 2, 2.0 * t * (1.0 - t), t**2)
        _GRID_CACHE[n] = cached
    return cached


def dense_arc_distance(point, arc, n=1_000_000):
    """Brute-force min distance to the quadratic Bezier over n+1 samples."""
    w0, w1, w2 = _weights(n)
    p = np.asarray(point)
    # component-wise evaluation avoids a (n, 3) temp
    dx = w0 * arc.p0[0] + w1 * arc.control[0] + w2 * arc.pd[0] - p[0]
    dy = w0 * arc.p0[1] + w1 * arc.control[1] + w2 * arc.pd[1] - p[1]
    dz = w0 * arc.p0[2] + w1 * arc.control[2] + w2 * arc.pd[2] - p[2]
    d2 = dx * dx
    d2 += dy * dy
    d2 += dz * dz
    return float(np.sqrt(d2.min()))


def scipy_corners(pose, shape):
    q = pose.orientation
    rot = Rotation.from_quat([q[1], q[2], q[3], q[0]])
    h = np.asarray(shape.half_extents)
    offsets = np.array(
        [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    ) * h
    return rot.apply(offsets) + np.asarray(pose.position)


def longitude_winding_inside(apex, boundary, point, t_max):
    """Lasso containment via pole rotation: wrap longitude steps around the
    query direction; directions outside the boundary hemisphere are out."""
    apex = np.asarray(apex, dtype=float)
    p = np.asarray(point, dtype=float)
    d = np.linalg.norm(p - apex)
    if d <= 0.0 or d > t_max:
        return False
    q = (p - apex) / d
    rel = np.asarray(boundary, dtype=float) - apex
    dirs = rel / np.linalg.norm(rel, axis=1, keepdims=True)
    mean = dirs.mean(axis=0)
    if np.dot(q, mean) <= 0.0:  # mirror cone behind the controller
        return False
    helper = np.array([1.0, 0.0, 0.0]) if abs(q[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - np.dot(helper, q) * q
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(q, e1)
    lon = np.arctan2(dirs @ e2, dirs @ e1)
    steps = np.diff(np.append(lon, lon[0]))
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(steps.sum() / (2.0 * np.pi))) != 0


def probe_overlap_oracle(pose, shape, volume):
    """Reimplemented 9-probe overlap rule (corners via scipy + longitude winding)."""
    probes = list(scipy_corners(pose, shape)) + [np.asarray(pose.position)]
    return any(
        longitude_winding_inside(volume.apex, volume.boundary, p, volume.t_max)
        for p in probes
    )


def downsample_oracle(points, spacing=0.01):
    """Reimplementation of boundary thinning for the selection oracle."""
    kept = []
    for p in points:
        if kept and float(np.linalg.norm(np.asarray(p) - np.asarray(kept[-1]))) < spacing:
            continue
        if any(float(np.linalg.norm(np.asarray(p) - np.asarray(k))) <= 1e-6 for k in kept):
            continue
        kept.append(p)
    return kept
