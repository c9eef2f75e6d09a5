"""ghosttwin: author robot tasks by manipulating ghost twins of real objects.

Select objects with a ray or lasso, carry their ghosts under simplified
physics, snap them to default poses along arched trajectories, and compile
the ghost/real differences into an instruction batch a simulated robot
executes.
"""

from .config import EngineConfig, load_config
from .executor import execute_batch, execute_iter, validate
from .geometry import (
    LassoVolume,
    Ray,
    SurfaceHit,
    box_overlaps_lasso,
    first_hit,
    point_in_lasso,
    ray_box_intersect,
    surface_hit_point,
)
from .ghosts import (
    GhostObject,
    GrabState,
    compress,
    effective_box,
    grab,
    move,
    set_fill_by_drag,
    spawn_ghosts,
)
from .physics import PlacementRejectedError, penetration_depth, resting_support, settle
from .protocol import (
    Instruction,
    ProtocolError,
    RobotStatus,
    compile_instructions,
    decode,
    encode,
    encode_lines,
    iter_decode,
)
from .scene import (
    BoxShape,
    PhysicalObject,
    Pose,
    Scene,
    SceneParseError,
    SceneValidationError,
    SurfaceAnchor,
    load_scene,
    save_scene,
)
from .selection import SelectionResult, Stroke, begin_stroke, end_stroke, extend_stroke
from .session import ControllerEvent, ReplayResult, Session, replay
from .snap import ArcTrajectory, distance_to_arc, make_arc, should_snap, snap, set_default, trajectory_polyline

__version__ = "0.1.0"
