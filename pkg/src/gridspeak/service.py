"""HTTP service exposing the world, regions, instructions, and the trace."""
from __future__ import annotations

import json
import threading
import time
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .config import ActionDef, QuantifierTable
from .core import ParseError
from .executor import Simulation
from .resolver import DEFAULT_SEED
from .world import WorldState


class InstructionBody(BaseModel):
    text: str


class SimulationService:
    """Owns the simulation and the single ticking thread that mutates it.

    Every read and write goes through ``lock``, so handler threads only ever
    observe the world between ticks.
    """

    def __init__(self, sim: Simulation, tick_interval: float = 0.02):
        self.sim = sim
        self.tick_interval = tick_interval
        self.lock = threading.RLock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        # Merged push-stream log: trace events plus one "tick" frame per
        # simulation tick (poses after the tick). Tick frames are appended
        # exactly once per tick, so their tick numbers are consecutive.
        self.stream_log: list[dict] = []

    def _append_events(self, start: int) -> None:
        # Trace payloads keep their own "kind" (instruction/resolve/move/...);
        # pose frames are the only messages with kind == "tick".
        for event in self.sim.trace[start:]:
            self.stream_log.append(event.to_payload())

    def _append_tick_frame(self) -> None:
        self.stream_log.append(
            {
                "kind": "tick",
                "tick": self.sim.tick_count,
                "agents": [
                    {
                        "id": agent.id,
                        "cell": [agent.pose.cell.x, agent.pose.cell.z],
                        "heading": agent.pose.heading,
                    }
                    for agent in self.sim.world.agents.values()
                ],
            }
        )

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._loop, name="gridspeak-tick", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None

    def _loop(self) -> None:
        while not self._stop.is_set():
            with self.lock:
                if not self.sim.idle:
                    before = len(self.sim.trace)
                    self.sim.tick()
                    self._append_events(before)
                    self._append_tick_frame()
            self._stop.wait(self.tick_interval)  # wakes immediately on stop()

    # -- locked views ------------------------------------------------------

    def submit(self, agent_id: str, text: str):
        with self.lock:
            before = len(self.sim.trace)
            resolution = self.sim.submit(agent_id, text)
            self._append_events(before)
            return resolution

    def world_payload(self) -> dict:
        with self.lock:
            return {
                "tick": self.sim.tick_count,
                "world": self.sim.world.to_document(dynamic=True),
            }

    def regions_payload(self, location_id: str) -> dict | None:
        with self.lock:
            world = self.sim.world
            if location_id not in world.locations:
                return None
            rmap = world.region_map(location_id)
            return {
                "location": location_id,
                "gWidth": rmap.g_width,
                "gLength": rmap.g_length,
                "regions": [
                    {
                        "kind": kind,
                        "instance": instance,
                        "degree": degree,
                        "cells": sorted([c.x, c.z] for c in cells),
                    }
                    for kind, instance, degree, cells in rmap.rows()
                ],
            }

    def trace_payload(self, since: int) -> dict:
        with self.lock:
            return {
                "tick": self.sim.tick_count,
                "events": [e.to_payload() for e in self.sim.events_since(since)],
            }

    def snapshot(self) -> tuple[int, int, bool]:
        with self.lock:
            return self.sim.tick_count, len(self.stream_log), self.sim.idle

    def stream_slice(self, start: int) -> list[dict]:
        with self.lock:
            return self.stream_log[start:]


def create_app(
    world: WorldState,
    *,
    registry: dict[str, ActionDef] | None = None,
    qtable: QuantifierTable | None = None,
    seed: int = DEFAULT_SEED,
    radius: float | None = None,
    tick_interval: float = 0.02,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the HTTP app around a fresh simulation of ``world``."""
    sim = Simulation(world, registry=registry, qtable=qtable, seed=seed, radius=radius)
    service = SimulationService(sim, tick_interval)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        service.start()
        yield
        service.stop()

    app = FastAPI(title="gridspeak", lifespan=lifespan)
    app.state.service = service

    @app.get("/world")
    def get_world() -> dict:
        return service.world_payload()

    @app.get("/regions/{location_id}")
    def get_regions(location_id: str) -> dict:
        payload = service.regions_payload(location_id)
        if payload is None:
            raise HTTPException(status_code=404, detail=f"unknown location {location_id!r}")
        return payload

    @app.post("/agents/{agent_id}/instruction")
    def post_instruction(agent_id: str, body: InstructionBody) -> dict:
        try:
            resolution = service.submit(agent_id, body.text)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown agent {agent_id!r}")
        except ParseError as exc:
            raise HTTPException(status_code=422, detail=exc.to_payload())
        with service.lock:
            tick = service.sim.tick_count
        return {"tick": tick, "resolution": resolution.to_payload()}

    @app.get("/trace")
    def get_trace(since: int = -1) -> dict:
        return service.trace_payload(since)

    @app.get("/events")
    def get_events(max_ticks: int | None = None) -> StreamingResponse:
        """Push stream of trace events interleaved with one pose frame per tick.

        Frames carry ``kind: "tick"`` and consecutive tick numbers; the stream
        closes once the simulation idles (or after ``max_ticks`` frames).
        """

        def stream():
            cursor = 0
            frames = 0
            while True:
                for message in service.stream_slice(cursor):
                    cursor += 1
                    yield f"data: {json.dumps(message)}\n\n"
                    if message["kind"] == "tick":
                        frames += 1
                        if max_ticks is not None and frames >= max_ticks:
                            return
                _, total, idle = service.snapshot()
                if total == cursor and idle:
                    return
                time.sleep(service.tick_interval / 2)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
