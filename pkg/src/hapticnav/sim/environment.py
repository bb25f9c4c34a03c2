"""A rectangular room with static and moving obstacles.

Dynamic obstacles patrol a closed polyline at constant speed; their
position is a pure function of time, so a seeded trial replays exactly.
No collision physics: obstacles matter through being seen.
"""
from __future__ import annotations

import json
import math
import pathlib
from dataclasses import dataclass

from ..errors import InputError


@dataclass(frozen=True)
class StaticObstacle:
    """A fixed cylinder: footprint radius, physical height by label."""

    label: str
    x_m: float
    y_m: float
    radius_m: float
    height_m: float

    def __post_init__(self) -> None:
        if self.radius_m <= 0 or self.height_m <= 0:
            raise InputError(f"obstacle {self.label!r} needs positive radius and height")


@dataclass(frozen=True)
class DynamicObstacle:
    """A cylinder patrolling a closed loop of waypoints at fixed speed."""

    label: str
    radius_m: float
    height_m: float
    route: tuple[tuple[float, float], ...]
    speed_mps: float

    def __post_init__(self) -> None:
        if self.radius_m <= 0 or self.height_m <= 0:
            raise InputError(f"obstacle {self.label!r} needs positive radius and height")
        if len(self.route) < 2:
            raise InputError(f"obstacle {self.label!r} route needs at least 2 points")
        if self.speed_mps <= 0:
            raise InputError(f"obstacle {self.label!r} needs positive speed")

    def _legs(self) -> list[tuple[tuple[float, float], tuple[float, float], float]]:
        points = list(self.route) + [self.route[0]]
        legs = []
        for a, b in zip(points, points[1:]):
            length = math.hypot(b[0] - a[0], b[1] - a[1])
            if length > 1e-9:
                legs.append((a, b, length))
        if not legs:
            raise InputError(f"obstacle {self.label!r} route has zero length")
        return legs

    def position_at(self, t_s: float) -> tuple[float, float]:
        legs = self._legs()
        total = sum(length for _, _, length in legs)
        walked = (self.speed_mps * t_s) % total
        for a, b, length in legs:
            if walked <= length:
                frac = walked / length
                return (a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1]))
            walked -= length
        return legs[-1][1]


@dataclass(frozen=True)
class PlacedObstacle:
    """An obstacle's footprint at one instant."""

    label: str
    x_m: float
    y_m: float
    radius_m: float
    height_m: float


@dataclass(frozen=True)
class Environment:
    """The room and everything in it."""

    room_width_m: float = 6.0
    room_depth_m: float = 6.0
    static_obstacles: tuple[StaticObstacle, ...] = ()
    dynamic_obstacles: tuple[DynamicObstacle, ...] = ()

    def __post_init__(self) -> None:
        if self.room_width_m <= 0 or self.room_depth_m <= 0:
            raise InputError("room dimensions must be positive")
        for obstacle in self.static_obstacles:
            self._check_inside(obstacle.label, obstacle.x_m, obstacle.y_m)
        for obstacle in self.dynamic_obstacles:
            for x, y in obstacle.route:
                self._check_inside(obstacle.label, x, y)

    def _check_inside(self, label: str, x: float, y: float) -> None:
        if not (0.0 <= x <= self.room_width_m and 0.0 <= y <= self.room_depth_m):
            raise InputError(
                f"obstacle {label!r} at ({x}, {y}) is outside the "
                f"{self.room_width_m}x{self.room_depth_m} m room"
            )

    @property
    def is_empty(self) -> bool:
        return not self.static_obstacles and not self.dynamic_obstacles

    def obstacles_at(self, t_s: float) -> list[PlacedObstacle]:
        placed = [
            PlacedObstacle(o.label, o.x_m, o.y_m, o.radius_m, o.height_m)
            for o in self.static_obstacles
        ]
        for o in self.dynamic_obstacles:
            x, y = o.position_at(t_s)
            placed.append(PlacedObstacle(o.label, x, y, o.radius_m, o.height_m))
        return placed

    def to_dict(self) -> dict:
        return {
            "room_width_m": self.room_width_m,
            "room_depth_m": self.room_depth_m,
            "static_obstacles": [
                {
                    "label": o.label,
                    "x_m": o.x_m,
                    "y_m": o.y_m,
                    "radius_m": o.radius_m,
                    "height_m": o.height_m,
                }
                for o in self.static_obstacles
            ],
            "dynamic_obstacles": [
                {
                    "label": o.label,
                    "radius_m": o.radius_m,
                    "height_m": o.height_m,
                    "route": [list(p) for p in o.route],
                    "speed_mps": o.speed_mps,
                }
                for o in self.dynamic_obstacles
            ],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Environment":
        try:
            return cls(
                room_width_m=float(raw.get("room_width_m", 6.0)),
                room_depth_m=float(raw.get("room_depth_m", 6.0)),
                static_obstacles=tuple(
                    StaticObstacle(
                        label=str(o["label"]),
                        x_m=float(o["x_m"]),
                        y_m=float(o["y_m"]),
                        radius_m=float(o["radius_m"]),
                        height_m=float(o["height_m"]),
                    )
                    for o in raw.get("static_obstacles", [])
                ),
                dynamic_obstacles=tuple(
                    DynamicObstacle(
                        label=str(o["label"]),
                        radius_m=float(o["radius_m"]),
                        height_m=float(o["height_m"]),
                        route=tuple((float(x), float(y)) for x, y in o["route"]),
                        speed_mps=float(o["speed_mps"]),
                    )
                    for o in raw.get("dynamic_obstacles", [])
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad environment: {exc}") from exc

    @classmethod
    def from_json(cls, path: str | pathlib.Path) -> "Environment":
        try:
            return cls.from_dict(json.loads(pathlib.Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"bad environment file {path}: {exc}") from exc

    def to_json(self, path: str | pathlib.Path) -> None:
        pathlib.Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")
