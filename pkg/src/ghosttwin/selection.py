"""Stroke handling: a click selects one object, a drag draws a lasso.

The two gestures share one stroke type; end_stroke disambiguates by the
path length traced over scene surfaces (2 cm threshold — a distance
criterion replays deterministically, a time criterion would not).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .geometry import LassoVolume, Ray, box_overlaps_lasso, first_hit, surface_hit_point
from .scene import Scene
from .transforms import Vec3, vdist

CLICK_PATH_THRESHOLD = 0.02  # meters of surface path below which a stroke is a click
BOUNDARY_SPACING = 0.01  # min spacing between kept boundary points
T_MAX_FACTOR = 1.5  # lasso depth cap relative to the farthest boundary point

MODE_SINGLE = "single"
MODE_LASSO = "lasso"
MODE_EMPTY = "empty"


@dataclass(frozen=True)
class StrokeSample:
    time: float
    ray: Ray
    surface_point: Optional[Vec3]


@dataclass(frozen=True)
class Stroke:
    samples: tuple[StrokeSample, ...]

    def __post_init__(self):
        if not self.samples:
            raise ValueError("a stroke has at least one sample")
        times = [s.time for s in self.samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("stroke timestamps must be strictly increasing")

    @property
    def apex(self) -> Vec3:
        return self.samples[-1].ray.origin

    def surface_points(self) -> list[Vec3]:
        return [s.surface_point for s in self.samples if s.surface_point is not None]


@dataclass(frozen=True)
class SelectionResult:
    object_ids: tuple[str, ...]
    mode: str  # single | lasso | empty
    volume: Optional[LassoVolume] = None  # present in lasso mode, for display


def begin_stroke(ray: Ray, time: float, scene: Scene) -> Stroke:
    hit = surface_hit_point(ray, scene)
    point = hit.point if hit is not None else None
    return Stroke(samples=(StrokeSample(time, ray, point),))


def extend_stroke(stroke: Stroke, ray: Ray, time: float, scene: Scene) -> Stroke:
    if time <= stroke.samples[-1].time:
        raise ValueError(
            f"out-of-order stroke sample: {time} after {stroke.samples[-1].time}"
        )
    hit = surface_hit_point(ray, scene)
    point = hit.point if hit is not None else None
    return Stroke(samples=stroke.samples + (StrokeSample(time, ray, point),))


def _surface_path_length(points: list[Vec3]) -> float:
    return sum(vdist(a, b) for a, b in zip(points, points[1:]))


def _downsample(points: list[Vec3], spacing: float) -> list[Vec3]:
    """Thin the boundary to the given min spacing, dropping near-duplicates."""
    kept: list[Vec3] = []
    for p in points:
        if kept and vdist(p, kept[-1]) < spacing:
            continue
        if any(vdist(p, k) <= 1e-6 for k in kept):
            continue
        kept.append(p)
    return kept


def _single_select(stroke: Stroke, scene: Scene) -> SelectionResult:
    hit = first_hit(stroke.samples[0].ray, scene)
    if hit is not None and scene.has_object(hit.target_id):
        return SelectionResult(object_ids=(hit.target_id,), mode=MODE_SINGLE)
    return SelectionResult(object_ids=(), mode=MODE_EMPTY)


def end_stroke(
    stroke: Stroke,
    scene: Scene,
    click_threshold: float = CLICK_PATH_THRESHOLD,
    boundary_spacing: float = BOUNDARY_SPACING,
    t_max_factor: float = T_MAX_FACTOR,
) -> SelectionResult:
    """Resolve the stroke on trigger release.

    Short or degenerate strokes single-select with the press-moment ray;
    anything longer becomes a lasso over every object its volume overlaps,
    ordered by id.
    """
    points = stroke.surface_points()
    if len(points) < 3 or _surface_path_length(points) < click_threshold:
        return _single_select(stroke, scene)

    boundary = _downsample(points, boundary_spacing)
    if len(boundary) < 3:
        # Long path but too few spaced surface points to enclose anything.
        return _single_select(stroke, scene)

    apex = stroke.apex
    t_max = t_max_factor * max(vdist(apex, p) for p in boundary)
    volume = LassoVolume(apex=apex, boundary=tuple(boundary), t_max=t_max)
    selected = sorted(
        o.id for o in scene.objects if box_overlaps_lasso(o.pose, o.shape, volume)
    )
    if not selected:
        return SelectionResult(object_ids=(), mode=MODE_EMPTY, volume=volume)
    return SelectionResult(object_ids=tuple(selected), mode=MODE_LASSO, volume=volume)
