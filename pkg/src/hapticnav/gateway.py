"""WebSocket gateway for live, watchable navigation sessions.

One socket, one session. The client starts a trial, the gateway runs the
same closed loop as the batch simulator in an asyncio task, and every
tick streams type-tagged JSON: a pose update first, then any cue
playbacks that started, scene changes, waypoint arrivals, and finally a
completion message with the walk's metrics. Every message carries the
session id.

The client may steer by hand at any time. Human steering replaces the
felt haptic cue until changed ("auto" hands control back), is never
passed through the confusion model, and ignores the per-cue turn budget;
someone holding an arrow key can see where they are going. After the
final waypoint the loop keeps ticking until the arrival tap has actually
played, so observers always hear the confirmation.
"""
from __future__ import annotations

import asyncio
import json
import math
import uuid

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import __version__
from .errors import InputError
from .haptics.patterns import HapticPatternId
from .haptics.scheduler import PatternScheduler
from .navigator import (
    GuidanceCue,
    GuidanceState,
    Path,
    Pose,
    bundled_path,
    bundled_path_names,
    compute_metrics,
    guidance_step,
)
from .perception import map_frame
from .policy import Sensitivity, filter_objects
from .scene import SceneWindow, summarize
from .sim.agent import AgentModel, step_agent
from .sim.camera import SyntheticCameraConfig, synth_camera
from .sim.confusion import bundled_profile, perfect_profile, sample_perceived
from .sim.environment import Environment
from .sim.trial import CUE_PATTERNS, ROTATION_PATTERNS, ActiveCue, TrialConfig, default_start_pose

_STEER_PATTERNS = {
    "forward": HapticPatternId.SLIDE_FRONT_FAST,
    "left": HapticPatternId.SLIDE_LEFT_FAST,
    "right": HapticPatternId.SLIDE_RIGHT_FAST,
}
_STEER_VALUES = ("auto", "stop") + tuple(_STEER_PATTERNS)


def _parse_path(value) -> Path:
    if isinstance(value, str):
        if value in bundled_path_names():
            return bundled_path(value)
        raise InputError(f"unknown path {value!r}; bundled: {bundled_path_names()}")
    if isinstance(value, dict):
        try:
            return Path(
                name=str(value.get("name", "custom")),
                waypoints=tuple((float(x), float(y)) for x, y in value["waypoints"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad path payload: {exc}") from exc
    raise InputError("path must be a bundled name or {name, waypoints}")


class GatewaySession:
    """State machine behind one /session socket."""

    def __init__(self, socket: WebSocket):
        self.socket = socket
        self.session_id = uuid.uuid4().hex[:12]
        self._send_lock = asyncio.Lock()
        self._task: asyncio.Task | None = None
        self._steer = "auto"
        self._sensitivity = Sensitivity.MEDIUM

    # -- plumbing ----------------------------------------------------------

    async def send(self, type_: str, **fields) -> None:
        payload = {"type": type_, "session_id": self.session_id, **fields}
        async with self._send_lock:
            await self.socket.send_text(json.dumps(payload, sort_keys=True))

    async def error(self, message: str) -> None:
        await self.send("error", message=message)

    @property
    def running(self) -> bool:
        return self._task is not None and not self._task.done()

    async def shutdown(self) -> None:
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except (asyncio.CancelledError, Exception):
                pass
            self._task = None

    # -- message handling ----------------------------------------------------

    async def handle(self, raw: str) -> None:
        try:
            message = json.loads(raw)
            if not isinstance(message, dict) or "type" not in message:
                raise InputError("messages must be JSON objects with a type")
        except (json.JSONDecodeError, InputError) as exc:
            await self.error(f"bad message: {exc}")
            return
        kind = message["type"]
        try:
            if kind == "start":
                await self._handle_start(message)
            elif kind == "steer":
                await self._handle_steer(message)
            elif kind == "set_sensitivity":
                await self._handle_sensitivity(message)
            elif kind == "reset":
                await self._handle_reset()
            else:
                await self.error(f"unknown message type {kind!r}")
        except InputError as exc:
            await self.error(str(exc))

    async def _handle_start(self, message: dict) -> None:
        if self.running:
            raise InputError("session already running; send reset first")
        path = _parse_path(message.get("path", "path1"))
        seed = int(message.get("seed", 0))
        perception = str(message.get("perception", "perfect"))
        if perception not in ("perfect", "confused"):
            raise InputError(f"perception must be perfect or confused: {perception!r}")
        environment = (
            Environment.from_dict(message["environment"])
            if message.get("environment")
            else Environment()
        )
        try:
            config = TrialConfig(
                tick_hz=float(message.get("tick_hz", 10.0)),
                timeout_s=float(message.get("timeout_s", 120.0)),
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad trial settings: {exc}") from exc
        if "sensitivity" in message:
            self._sensitivity = Sensitivity(str(message["sensitivity"]))
        realtime = bool(message.get("realtime", True))
        self._steer = "auto"

        pose = default_start_pose(path)
        await self.send(
            "session_started",
            path_name=path.name,
            waypoints=[list(w) for w in path.waypoints],
            seed=seed,
            perception=perception,
            tick_hz=config.tick_hz,
            start_pose=[pose.x_m, pose.y_m, pose.heading_deg],
        )
        self._task = asyncio.create_task(
            self._run(path, environment, perception, seed, config, realtime, pose)
        )

    async def _handle_steer(self, message: dict) -> None:
        command = str(message.get("command", ""))
        if command not in _STEER_VALUES:
            raise InputError(f"steer command must be one of {sorted(_STEER_VALUES)}")
        self._steer = command

    async def _handle_sensitivity(self, message: dict) -> None:
        try:
            self._sensitivity = Sensitivity(str(message.get("sensitivity", "")))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        await self.send("sensitivity_set", sensitivity=self._sensitivity.value)

    async def _handle_reset(self) -> None:
        await self.shutdown()
        self._steer = "auto"
        await self.send("session_reset")

    # -- the loop ------------------------------------------------------------

    async def _run(
        self,
        path: Path,
        environment: Environment,
        perception: str,
        seed: int,
        config: TrialConfig,
        realtime: bool,
        pose: Pose,
    ) -> None:
        profile = bundled_profile() if perception == "confused" else perfect_profile()
        rng = np.random.default_rng(seed)
        dt = 1.0 / config.tick_hz
        scheduler = PatternScheduler(rest_gap_ms=config.rest_gap_ms)
        agent = AgentModel()
        state = GuidanceState(origin=(pose.x_m, pose.y_m))
        active = ActiveCue()
        pending: list[tuple[float, HapticPatternId, float]] = []
        window = SceneWindow(capacity=config.scene_window)
        ranging = (
            config.camera.ranging_model(environment) if not environment.is_empty else None
        )
        trajectory: list[tuple[float, Pose]] = [(0.0, pose)]
        last_scene: list[dict] | None = None
        tap_due = False
        finished = False
        completed = False
        n_cues = 0
        n_playbacks = 0
        max_ticks = int(math.ceil(config.timeout_s * config.tick_hz))

        for k in range(1, max_ticks + 1):
            t_s = k * dt
            t_ms = t_s * 1000.0

            hazard = False
            scene_objects: list[dict] | None = None
            if ranging is not None:
                frame, _ = synth_camera(environment, pose, config.camera, t_s=t_s, frame_id=k)
                window.push(k, map_frame(frame, ranging))
                if len(window) >= config.persistence_k:
                    summary = summarize(window, config.persistence_k)
                    hazard = bool(summary.hazards())
                    scene_objects = [
                        o.to_dict() for o in filter_objects(summary, self._sensitivity)
                    ]

            arrived_index: int | None = None
            previous = state
            cue, state = guidance_step(pose, state, path, config.tolerances)
            if cue is GuidanceCue.TAP_FRONT_ARRIVED:
                arrived_index = previous.waypoint_index
            elif cue is GuidanceCue.FINISHED and not previous.done:
                arrived_index = len(path.waypoints) - 1
                completed = True
            if cue in (GuidanceCue.TAP_FRONT_ARRIVED, GuidanceCue.FINISHED):
                tap_due = True
            if not finished and not hazard:
                pattern = HapticPatternId.TAP_FRONT if tap_due else CUE_PATTERNS[cue]
                scheduler.submit(pattern, t_ms)
                n_cues += 1

            started = []
            for event in scheduler.advance(t_ms):
                if event.pattern is HapticPatternId.TAP_FRONT:
                    tap_due = False
                perceived = sample_perceived(event.pattern, profile, rng)
                pending.append(
                    (event.start_ms + profile.reaction_latency_ms, perceived, event.end_ms)
                )
                started.append((event, perceived))
                n_playbacks += 1
            while pending and pending[0][0] <= t_ms:
                effect_ms, perceived, end_ms = pending.pop(0)
                active.take(
                    perceived, effect_ms, end_ms, profile.reaction_latency_ms, config.turn_limit_deg
                )

            felt = active.current(t_ms)
            if hazard:
                felt = None
            if self._steer != "auto":
                felt = _STEER_PATTERNS.get(self._steer)  # "stop" maps to None
            elif felt in ROTATION_PATTERNS:
                active.spend_turn(agent.turn_rate_dps * dt)
            pose = step_agent(pose, felt, agent, dt)
            trajectory.append((t_s, pose))

            await self.send(
                "pose_update",
                tick=k,
                t_s=round(t_s, 4),
                x_m=pose.x_m,
                y_m=pose.y_m,
                heading_deg=pose.heading_deg,
                steer=self._steer,
            )
            for event, perceived in started:
                await self.send(
                    "cue_event",
                    t_s=round(t_s, 4),
                    pattern=event.pattern.value,
                    perceived=perceived.value,
                    start_ms=event.start_ms,
                    duration_ms=event.end_ms - event.start_ms,
                )
            if scene_objects is not None and scene_objects != last_scene:
                await self.send("scene_update", objects=scene_objects, hazard=hazard)
                last_scene = scene_objects
            if arrived_index is not None:
                await self.send(
                    "waypoint_reached", index=arrived_index, t_s=round(t_s, 4)
                )

            if cue is GuidanceCue.FINISHED:
                finished = True
            if finished and scheduler.is_idle(t_ms):
                break
            await asyncio.sleep(dt if realtime else 0)
        metrics = compute_metrics(trajectory, path, config.tolerances)
        await self.send(
            "trial_complete",
            completed=completed,
            timed_out=not completed,
            metrics=metrics.to_dict(),
            cues=n_cues,
            playbacks=n_playbacks,
        )


def create_app() -> FastAPI:
    app = FastAPI(title="hapticnav gateway", version=__version__)

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok", "version": __version__}

    @app.websocket("/session")
    async def session(socket: WebSocket) -> None:
        await socket.accept()
        handler = GatewaySession(socket)
        try:
            while True:
                raw = await socket.receive_text()
                await handler.handle(raw)
        except WebSocketDisconnect:
            pass
        finally:
            await handler.shutdown()

    return app
