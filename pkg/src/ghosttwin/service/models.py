"""Pydantic models for the live session wire protocol.

Clients send controller events (the same JSON as trace lines). The server
pushes typed messages, each carrying a monotonically increasing rev so a
client can detect gaps and resync by reconnecting.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from ..scene import Pose
from ..session import ControllerEvent


class PoseModel(BaseModel):
    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float]

    @classmethod
    def from_pose(cls, pose: Pose) -> "PoseModel":
        return cls(position=pose.position, orientation=pose.orientation)

    def to_pose(self) -> Pose:
        return Pose(tuple(self.position), tuple(self.orientation))


class ControllerEventMsg(BaseModel):
    """Client -> server: one controller event, identical to a trace line."""

    t: float
    kind: Literal["pose_update", "trigger_down", "trigger_up", "menu"]
    pose: Optional[PoseModel] = None
    action: Optional[Literal["set_default", "begin_fill", "end_fill", "commit"]] = None

    @model_validator(mode="after")
    def _fields_match_kind(self):
        if (self.kind == "pose_update") != (self.pose is not None):
            raise ValueError("pose is present exactly on pose_update")
        if (self.kind == "menu") != (self.action is not None):
            raise ValueError("action is present exactly on menu")
        return self

    def to_event(self) -> ControllerEvent:
        return ControllerEvent(
            time=self.t,
            kind=self.kind,
            pose=self.pose.to_pose() if self.pose else None,
            action=self.action,
        )


class GhostModel(BaseModel):
    object_id: str
    pose: PoseModel
    phase: str
    group_id: int
    fill_level: Optional[float] = None
    height_factor: Optional[float] = None


class ObjectPoseModel(BaseModel):
    id: str
    pose: PoseModel
    fill_level: Optional[float] = None
    height_factor: Optional[float] = None


class SelectionInfo(BaseModel):
    ids: list[str]
    boundary: list[tuple[float, float, float]]
    mode: str


class ArcInfo(BaseModel):
    object_id: str
    points: list[tuple[float, float, float]]


class SnapshotMsg(BaseModel):
    type: Literal["snapshot"] = "snapshot"
    rev: int
    scene: dict
    ghosts: list[GhostModel]
    selection: SelectionInfo
    arcs: list[ArcInfo]
    mode: str


class DiffMsg(BaseModel):
    type: Literal["diff"] = "diff"
    rev: int
    objects: list[ObjectPoseModel] = Field(default_factory=list)
    ghosts: list[GhostModel] = Field(default_factory=list)


class SelectionMsg(BaseModel):
    type: Literal["selection"] = "selection"
    rev: int
    ids: list[str]
    boundary: list[tuple[float, float, float]]
    mode: str


class ArcMsg(BaseModel):
    type: Literal["arc"] = "arc"
    rev: int
    arcs: list[ArcInfo]


class InstructionsMsg(BaseModel):
    type: Literal["instructions"] = "instructions"
    rev: int
    lines: list[str]


class StatusMsg(BaseModel):
    type: Literal["status"] = "status"
    rev: int
    line: str


ServerMsg = Union[SnapshotMsg, DiffMsg, SelectionMsg, ArcMsg, InstructionsMsg, StatusMsg]
