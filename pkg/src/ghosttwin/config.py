"""Engine tunables, loadable from a JSON config file.

Centralizing these keeps replay goldens reproducible: a replay is a pure
function of (scene bytes, trace bytes, config).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields


@dataclass(frozen=True)
class EngineConfig:
    corridor_radius: float = 0.15  # snap tube radius around the arc
    click_threshold: float = 0.02  # surface path length separating click from lasso
    lasso_spacing: float = 0.01  # min spacing of kept boundary points
    t_max_factor: float = 1.5  # lasso depth cap vs farthest boundary point
    arc_apex_min: float = 0.3
    arc_apex_factor: float = 0.25
    step_count: int = 4  # executor statuses per instruction
    step_delay_s: float = 0.0  # serve-mode pacing between executor steps


def load_config(text: str) -> EngineConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed config JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a JSON object")
    known = {f.name: f.type for f in fields(EngineConfig)}
    unknown = set(raw) - set(known)
    if unknown:
        raise ValueError(f"unknown config fields {sorted(unknown)}")
    if "step_count" in raw and (not isinstance(raw["step_count"], int) or raw["step_count"] < 1):
        raise ValueError("step_count must be an integer >= 1")
    for key, value in raw.items():
        if key != "step_count" and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise ValueError(f"config field {key!r} must be a number")
    return EngineConfig(**raw)
