"""FastAPI service hosting one live authoring session.

Every state change flows through a single asyncio lock, so handlers never
run concurrently: network I/O only feeds the totally ordered event stream.
Each connected client gets its own outbound queue; slow clients lag, they
do not stall the session. Clients recover from rev gaps by reconnecting,
which always starts with a fresh snapshot.
"""

from __future__ import annotations

import asyncio
from contextlib import asynccontextmanager
from dataclasses import replace
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from pydantic import ValidationError

from ..config import EngineConfig
from ..executor import execute_iter
from ..protocol import encode
from ..scene import load_scene, scene_to_raw
from ..session import Session
from ..snap import trajectory_polyline
from .models import (
    ArcInfo,
    ArcMsg,
    ControllerEventMsg,
    DiffMsg,
    GhostModel,
    InstructionsMsg,
    ObjectPoseModel,
    PoseModel,
    SelectionInfo,
    SelectionMsg,
    SnapshotMsg,
    StatusMsg,
)

ARC_POLYLINE_SAMPLES = 32


class LiveHub:
    """Owns the session, the rev counter, and the connected clients."""

    def __init__(self, session: Session, config: EngineConfig):
        self.session = session
        self.config = config
        self.rev = 0
        self.lock = asyncio.Lock()
        self._queues: list[asyncio.Queue] = []
        self._executor_tasks: set[asyncio.Task] = set()

    # -- client plumbing ---------------------------------------------------

    def attach(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        self._queues.append(queue)
        return queue

    def detach(self, queue: asyncio.Queue) -> None:
        if queue in self._queues:
            self._queues.remove(queue)

    def _broadcast(self, message) -> None:
        for queue in self._queues:
            queue.put_nowait(message)

    def _next_rev(self) -> int:
        self.rev += 1
        return self.rev

    # -- message builders ----------------------------------------------------

    def _ghost_models(self) -> list[GhostModel]:
        return [
            GhostModel(
                object_id=g.object_id,
                pose=PoseModel.from_pose(g.pose),
                phase=g.phase,
                group_id=g.group_id,
                fill_level=g.fill_level,
                height_factor=g.height_factor,
            )
            for g in self.session.ghosts.values()
        ]

    def _selection_info(self) -> SelectionInfo:
        session = self.session
        if session.stroke is not None:
            return SelectionInfo(
                ids=[], boundary=[tuple(p) for p in session.stroke.surface_points()],
                mode="drawing",
            )
        last = session.last_selection
        if last is None:
            return SelectionInfo(ids=[], boundary=[], mode="empty")
        boundary = list(last.volume.boundary) if last.volume is not None else []
        return SelectionInfo(ids=list(last.object_ids), boundary=boundary, mode=last.mode)

    def _arc_infos(self) -> list[ArcInfo]:
        return [
            ArcInfo(
                object_id=object_id,
                points=[tuple(p) for p in trajectory_polyline(arc, ARC_POLYLINE_SAMPLES)],
            )
            for object_id, arc in self.session.arcs.items()
        ]

    def snapshot(self) -> SnapshotMsg:
        return SnapshotMsg(
            rev=self._next_rev(),
            scene=scene_to_raw(self.session.scene),
            ghosts=self._ghost_models(),
            selection=self._selection_info(),
            arcs=self._arc_infos(),
            mode=self.session.mode,
        )

    def _object_models(self) -> list[ObjectPoseModel]:
        out = []
        for o in self.session.scene.objects:
            out.append(
                ObjectPoseModel(
                    id=o.id,
                    pose=PoseModel.from_pose(o.pose),
                    fill_level=o.fillable.fill_level if o.fillable else None,
                    height_factor=o.compressible.current_factor if o.compressible else None,
                )
            )
        return out

    # -- event handling --------------------------------------------------------

    async def handle_event(self, msg: ControllerEventMsg) -> None:
        async with self.lock:
            event = msg.to_event()
            # Live clients restart their clocks on reload; keep session time
            # monotone instead of dropping their events. Trace replay keeps
            # the strict guard.
            last = self.session._last_time
            if last is not None and event.time <= last:
                event = replace(event, time=last + 1e-6)
            tags = self.session.step(event)
            committed = "instructions" in tags
            for message in self._messages_for(tags):
                self._broadcast(message)
            if committed:
                batch = self.session.batches[-1]
                if batch:
                    task = asyncio.create_task(self._run_executor(batch))
                    self._executor_tasks.add(task)
                    task.add_done_callback(self._executor_tasks.discard)

    def _messages_for(self, tags) -> list:
        messages = []
        if "stroke" in tags or "selection" in tags:
            info = self._selection_info()
            messages.append(
                SelectionMsg(rev=self._next_rev(), ids=info.ids, boundary=info.boundary, mode=info.mode)
            )
        if "ghosts" in tags:
            messages.append(DiffMsg(rev=self._next_rev(), ghosts=self._ghost_models()))
        if "arcs" in tags:
            messages.append(ArcMsg(rev=self._next_rev(), arcs=self._arc_infos()))
        if "scene" in tags or "mode" in tags:
            messages.append(self.snapshot())
        if "instructions" in tags:
            lines = [encode(i) for i in self.session.batches[-1]]
            messages.append(InstructionsMsg(rev=self._next_rev(), lines=lines))
        return messages

    async def _run_executor(self, batch) -> None:
        """Simulated robot: streams status lines and mutates the real scene."""
        for status, scene in execute_iter(batch, self.session.scene, self.config.step_count):
            if self.config.step_delay_s > 0:
                await asyncio.sleep(self.config.step_delay_s)
            async with self.lock:
                self.session.scene = scene
                self._broadcast(StatusMsg(rev=self._next_rev(), line=encode(status)))
                self._broadcast(
                    DiffMsg(rev=self._next_rev(), objects=self._object_models())
                )


def create_app(
    scene_text: str, config: EngineConfig = EngineConfig(), ui_dir: Optional[str] = None
) -> FastAPI:
    hub = LiveHub(Session(load_scene(scene_text), config), config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        for task in list(hub._executor_tasks):
            task.cancel()

    app = FastAPI(title="ghosttwin live session", lifespan=lifespan)
    app.state.hub = hub

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.get("/scene")
    async def get_scene():
        async with hub.lock:
            return scene_to_raw(hub.session.scene)

    @app.get("/state")
    async def get_state():
        async with hub.lock:
            return hub.snapshot().model_dump()

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        # Attach and snapshot atomically so the client's rev stream starts at
        # the snapshot and stays strictly consecutive.
        async with hub.lock:
            queue = hub.attach()
            queue.put_nowait(hub.snapshot())

        async def pump():
            while True:
                message = await queue.get()
                await ws.send_text(message.model_dump_json())

        sender = asyncio.create_task(pump())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = ControllerEventMsg.model_validate_json(raw)
                except ValidationError as exc:
                    await ws.send_text(f'{{"type":"error","detail":"{exc.error_count()} invalid field(s)"}}')
                    continue
                await hub.handle_event(msg)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            hub.detach(queue)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
