"""Gateway: health, session streaming, steering, validation."""
from __future__ import annotations

import asyncio
import json

import pytest
from fastapi.testclient import TestClient

from hapticnav.gateway import GatewaySession, create_app
from hapticnav.navigator import bundled_path
from hapticnav.sim.environment import Environment, StaticObstacle
from hapticnav.sim.trial import TrialConfig, default_start_pose


@pytest.fixture()
def client():
    return TestClient(create_app())


def read_until(ws, type_: str, limit: int = 20000) -> tuple[dict, list[dict]]:
    """Next message of the wanted type, plus everything seen on the way."""
    seen = []
    for _ in range(limit):
        message = ws.receive_json()
        seen.append(message)
        if message["type"] == type_:
            return message, seen
    raise AssertionError(f"no {type_!r} within {limit} messages")


def start_message(**overrides) -> dict:
    message = {
        "type": "start",
        "path": "path1",
        "seed": 0,
        "perception": "perfect",
        "realtime": False,
    }
    message.update(overrides)
    return message


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["version"]


def test_full_session_streams_the_walk(client):
    path = bundled_path("path1")
    with client.websocket_connect("/session") as ws:
        ws.send_text(json.dumps(start_message()))
        started = ws.receive_json()
        assert started["type"] == "session_started"
        assert started["path_name"] == "path1"
        assert started["waypoints"] == [list(w) for w in path.waypoints]
        session_id = started["session_id"]

        complete, seen = read_until(ws, "trial_complete")
        assert all(m["session_id"] == session_id for m in seen)

        poses = [m for m in seen if m["type"] == "pose_update"]
        assert poses and seen[0]["type"] == "pose_update"
        assert [p["tick"] for p in poses] == list(range(1, len(poses) + 1))

        cues = [m for m in seen if m["type"] == "cue_event"]
        assert cues
        assert all(c["duration_ms"] > 0 for c in cues)
        assert any(c["pattern"] == "tap_front" for c in cues)

        arrivals = [m["index"] for m in seen if m["type"] == "waypoint_reached"]
        assert arrivals == sorted(arrivals)
        assert arrivals[-1] == len(path.waypoints) - 1

        assert complete["completed"] is True
        assert complete["timed_out"] is False
        assert complete["metrics"]["waypoints_reached"] == len(path.waypoints)

        # The confirmation tap must have started before completion.
        final_taps = [c for c in cues if c["perceived"] == "tap_front"]
        assert final_taps


def test_inline_path_and_restart(client):
    mini = {"name": "mini", "waypoints": [[0.0, 0.0], [0.6, 0.0]]}
    with client.websocket_connect("/session") as ws:
        ws.send_text(json.dumps(start_message(path=mini)))
        started = ws.receive_json()
        assert started["path_name"] == "mini"
        complete, seen = read_until(ws, "trial_complete")
        assert complete["completed"] is True
        arrivals = [m["index"] for m in seen if m["type"] == "waypoint_reached"]
        assert arrivals == [0, 1]

        # The same socket can run another trial once the first is done.
        ws.send_text(json.dumps(start_message()))
        started_again, _ = read_until(ws, "session_started")
        assert started_again["session_id"] == started["session_id"]
        read_until(ws, "trial_complete")


def test_timeout_reports_incomplete(client):
    with client.websocket_connect("/session") as ws:
        ws.send_text(json.dumps(start_message(timeout_s=1.0)))
        complete, _ = read_until(ws, "trial_complete")
        assert complete["completed"] is False
        assert complete["timed_out"] is True


def test_obstacle_scene_updates_and_blocked_walk(client):
    environment = Environment(
        static_obstacles=(StaticObstacle("cart", 2.2, 1.0, 0.3, 0.8),)
    ).to_dict()
    with client.websocket_connect("/session") as ws:
        ws.send_text(json.dumps(start_message(environment=environment, timeout_s=5.0)))
        complete, seen = read_until(ws, "trial_complete")
        scenes = [m for m in seen if m["type"] == "scene_update"]
        assert scenes
        assert any(m["hazard"] for m in scenes)
        assert any(o["immediate_hazard"] for m in scenes for o in m["objects"])
        assert complete["completed"] is False


def test_validation_errors_keep_the_socket_alive(client):
    with client.websocket_connect("/session") as ws:
        ws.send_text("this is not json")
        assert ws.receive_json()["type"] == "error"
        ws.send_text(json.dumps({"no_type": True}))
        assert ws.receive_json()["type"] == "error"
        ws.send_text(json.dumps({"type": "warp"}))
        assert "unknown message type" in ws.receive_json()["message"]
        ws.send_text(json.dumps({"type": "steer", "command": "up"}))
        assert "steer command" in ws.receive_json()["message"]
        ws.send_text(json.dumps({"type": "start", "path": "nowhere"}))
        assert "unknown path" in ws.receive_json()["message"]
        # Still usable afterwards.
        ws.send_text(json.dumps({"type": "set_sensitivity", "sensitivity": "high"}))
        ack, _ = read_until(ws, "sensitivity_set")
        assert ack["sensitivity"] == "high"


def test_start_while_running_errors_then_reset_recovers(client):
    with client.websocket_connect("/session") as ws:
        ws.send_text(json.dumps(start_message(realtime=True, tick_hz=5.0)))
        read_until(ws, "session_started")
        ws.send_text(json.dumps(start_message()))
        message, _ = read_until(ws, "error")
        assert "already running" in message["message"]
        ws.send_text(json.dumps({"type": "reset"}))
        read_until(ws, "session_reset")
        ws.send_text(json.dumps(start_message(path={"name": "mini", "waypoints": [[0, 0], [0.6, 0]]})))
        read_until(ws, "session_started")
        complete, _ = read_until(ws, "trial_complete")
        assert complete["completed"] is True


class FakeSocket:
    """Collects outgoing frames so the loop can run without a network."""

    def __init__(self):
        self.sent: list[dict] = []

    async def send_text(self, text: str) -> None:
        self.sent.append(json.loads(text))


def run_session(steer: str, environment: Environment | None = None, timeout_s: float = 2.0):
    socket = FakeSocket()
    session = GatewaySession(socket)
    session._steer = steer
    path = bundled_path("path1")
    config = TrialConfig(timeout_s=timeout_s)
    asyncio.run(
        session._run(
            path,
            environment or Environment(),
            "perfect",
            0,
            config,
            False,
            default_start_pose(path),
        )
    )
    return socket.sent


def test_steer_stop_freezes_the_walker():
    messages = run_session("stop")
    poses = [m for m in messages if m["type"] == "pose_update"]
    assert all(p["x_m"] == poses[0]["x_m"] and p["y_m"] == poses[0]["y_m"] for p in poses)
    assert messages[-1]["type"] == "trial_complete"
    assert messages[-1]["completed"] is False


def test_steer_left_rotates_in_place():
    messages = run_session("left")
    poses = [m for m in messages if m["type"] == "pose_update"]
    assert all(p["x_m"] == poses[0]["x_m"] for p in poses)
    headings = [p["heading_deg"] for p in poses]
    assert headings == sorted(headings) and headings[-1] > headings[0]
    # Human steering ignores the per-cue turn budget: 2 s at 45 deg/s.
    assert headings[-1] - headings[0] > 45.0


def test_human_steering_bypasses_the_hazard_stop():
    blocker = Environment(static_obstacles=(StaticObstacle("cart", 2.2, 1.0, 0.3, 0.8),))
    autopilot = run_session("auto", environment=blocker, timeout_s=6.0)
    manual = run_session("forward", environment=blocker, timeout_s=6.0)
    last_auto = [m for m in autopilot if m["type"] == "pose_update"][-1]
    last_manual = [m for m in manual if m["type"] == "pose_update"][-1]
    assert last_auto["x_m"] < 1.6  # held back by the hazard stop
    assert last_manual["x_m"] > 4.0  # walked straight through
