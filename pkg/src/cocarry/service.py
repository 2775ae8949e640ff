"""FastAPI service wrapping the simulator.

REST endpoints cover scenario inspection/validation and headless runs; a
WebSocket session streams telemetry frames at 20 Hz and accepts operator
commands, closing the human-in-the-loop for the browser UI.  All messages are
JSON text frames with a `kind` discriminator and a version handshake on
connect.
"""

from __future__ import annotations

import asyncio
import json
from typing import Any

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel, Field

from .replay import region_episodes
from .scenario import (
    ScenarioError,
    ScenarioSpec,
    bundled_scenario_names,
    load_bundled,
    parse_scenario,
)
from .world import TELEMETRY_EVERY, CONTROL_DT, HumanCommand, RunLog, Script, SimWorld, run_headless

PROTOCOL_VERSION = 1
FRAME_PERIOD = TELEMETRY_EVERY * CONTROL_DT  # seconds of simulated time per frame


class ScenarioSummary(BaseModel):
    name: str
    room: dict[str, float]
    robot_start: dict[str, float]
    finish_x: float
    obstacles: list[list[list[float]]]


class ValidateRequest(BaseModel):
    document: str = Field(description="scenario YAML text")


class ValidateResponse(BaseModel):
    valid: bool
    error: str | None = None
    name: str | None = None


class ScriptEntry(BaseModel):
    t: float
    vx: float
    vy: float


class RunRequest(BaseModel):
    scenario: str = Field(description="bundled scenario name or YAML document")
    script: list[ScriptEntry] = Field(default_factory=list)
    seed: int = 0
    duration: float | None = None


class RunResponse(BaseModel):
    result: str
    end_time: float
    final_base: list[float]
    episodes: list[dict[str, Any]]
    vibration_log: list[str]


def _resolve_scenario(text: str) -> ScenarioSpec:
    if "\n" not in text and not text.strip().startswith("{"):
        return load_bundled(text.strip())
    return parse_scenario(text)


def _scenario_summary(spec: ScenarioSpec) -> ScenarioSummary:
    return ScenarioSummary(
        name=spec.name,
        room={
            "x_min": spec.room.x_min,
            "x_max": spec.room.x_max,
            "y_min": spec.room.y_min,
            "y_max": spec.room.y_max,
        },
        robot_start={
            "x": spec.robot_start.position.x,
            "y": spec.robot_start.position.y,
            "heading": spec.robot_start.heading,
        },
        finish_x=spec.finish_x,
        obstacles=[[[v.x, v.y] for v in poly.vertices] for poly in spec.obstacles],
    )


def create_app() -> FastAPI:
    app = FastAPI(title="cocarry", version="0.1.0")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "protocol_version": PROTOCOL_VERSION}

    @app.get("/scenarios")
    def scenarios() -> list[str]:
        return bundled_scenario_names()

    @app.get("/scenarios/{name}", response_model=ScenarioSummary)
    def scenario_detail(name: str) -> ScenarioSummary:
        try:
            return _scenario_summary(load_bundled(name))
        except ScenarioError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/scenario/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest) -> ValidateResponse:
        try:
            spec = parse_scenario(req.document)
        except Exception as exc:  # yaml errors included
            return ValidateResponse(valid=False, error=str(exc))
        return ValidateResponse(valid=True, name=spec.name)

    @app.post("/runs", response_model=RunResponse)
    def run(req: RunRequest) -> RunResponse:
        try:
            spec = _resolve_scenario(req.scenario)
        except ScenarioError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        script = Script([(e.t, e.vx, e.vy) for e in req.script])
        log: RunLog = run_headless(spec, script, seed=req.seed, duration=req.duration)
        return RunResponse(
            result=log.result,
            end_time=log.end_time,
            final_base=list(log.frames[-1].base),
            episodes=[
                {"region": r, "t0": a, "t1": b, "peak": p}
                for r, a, b, p in region_episodes(log.frames)
            ],
            vibration_log=log.vibration_lines,
        )

    @app.websocket("/session")
    async def session(ws: WebSocket) -> None:
        await ws.accept()
        name = ws.query_params.get("scenario", "scenario1")
        factor = float(ws.query_params.get("factor", "1.0"))
        try:
            spec = load_bundled(name)
        except ScenarioError as exc:
            await ws.send_text(json.dumps({"kind": "error", "message": str(exc)}))
            await ws.close()
            return
        await ws.send_text(json.dumps({
            "kind": "hello",
            "version": PROTOCOL_VERSION,
            "scenario": name,
            "frame_period": FRAME_PERIOD,
        }))
        await _session_loop(ws, spec, factor)

    return app


async def _session_loop(ws: WebSocket, spec: ScenarioSpec, factor: float) -> None:
    world = SimWorld(spec)
    paused = False
    command = HumanCommand(0.0, 0.0)
    inbox: asyncio.Queue[str | None] = asyncio.Queue()

    async def reader() -> None:
        try:
            while True:
                inbox.put_nowait(await ws.receive_text())
        except WebSocketDisconnect:
            inbox.put_nowait(None)

    reader_task = asyncio.create_task(reader())
    try:
        while True:
            while not inbox.empty():
                raw = inbox.get_nowait()
                if raw is None:
                    return  # client gone: session ends, simulation stops advancing
                reply = None
                try:
                    msg = json.loads(raw)
                    kind = msg.get("kind")
                    if kind == "command":
                        command = HumanCommand(float(msg["vx"]), float(msg["vy"]))
                    elif kind == "control":
                        action = msg.get("action")
                        if action == "pause":
                            paused = True
                        elif action == "resume":
                            paused = False
                        elif action == "reset":
                            world.reset()
                            command = HumanCommand(0.0, 0.0)
                        elif action == "select":
                            world = SimWorld(load_bundled(msg["scenario"]))
                            command = HumanCommand(0.0, 0.0)
                        else:
                            raise ValueError(f"unknown control action {action!r}")
                        reply = {"kind": "control_ack", "action": action}
                    elif kind == "hello":
                        if msg.get("version") != PROTOCOL_VERSION:
                            raise ValueError("protocol version mismatch")
                    else:
                        raise ValueError(f"unknown message kind {kind!r}")
                except (ValueError, KeyError, TypeError, ScenarioError) as exc:
                    reply = {"kind": "error", "message": str(exc)}
                if reply is not None:
                    await ws.send_text(json.dumps(reply))
            if not paused:
                for _ in range(TELEMETRY_EVERY):
                    world.step(command)
            frame = world.telemetry_frame()
            payload = json.loads(frame.to_json())
            payload["kind"] = "frame"
            payload["paused"] = paused
            try:
                await ws.send_text(json.dumps(payload, separators=(",", ":")))
            except (WebSocketDisconnect, RuntimeError):
                return
            if factor > 0:
                await asyncio.sleep(FRAME_PERIOD / factor)
            else:
                await asyncio.sleep(0)
    finally:
        reader_task.cancel()


app = create_app()
