"""Planar five-bar linkage kinematics for the temple actuators.

Each temple carries a five-bar linkage driven by two servos whose shafts
sit on a common baseline. Two proximal links lead to elbows, two distal
links meet at the end effector, which carries the skin contact tip. The
workspace of interest is a 70 mm line above and parallel to the baseline;
pressing into the skin moves the tip a small extra distance normal to it.

Coordinates: millimeters, origin midway between the motor shafts, x along
the baseline toward the front of the glasses, y toward the skin. Angles
are servo shaft angles in degrees, measured counterclockwise from +x, and
are kept unwrapped (they may exceed 180) so servo limits stay contiguous.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InputError
from .patterns import TEMPLE_SPAN_MM, Temple


class KinematicsError(RuntimeError):
    """Requested pose is outside what the linkage can reach."""


@dataclass(frozen=True)
class LinkageGeometry:
    """Link lengths and workspace placement for one actuator design.

    Link length pairs are (left motor, right motor), "left" meaning the
    motor at negative x. The contact line maps pattern positions to the
    plane: position p mm lands at (contact_x0_mm + p, contact_y_mm), and
    full pressure adds press_depth_mm along +y.
    """

    base_separation_mm: float = 30.0
    proximal_link_mm: tuple[float, float] = (25.0, 25.0)
    distal_link_mm: tuple[float, float] = (35.0, 35.0)
    contact_x0_mm: float = -35.0
    contact_y_mm: float = 25.0
    press_depth_mm: float = 1.5
    servo_min_deg: float = -30.0
    servo_max_deg: float = 210.0

    def __post_init__(self) -> None:
        lengths = (self.base_separation_mm, *self.proximal_link_mm, *self.distal_link_mm)
        if any(not v > 0 for v in lengths):
            raise InputError(f"link lengths must be positive: {lengths}")
        if self.press_depth_mm < 0:
            raise InputError(f"press depth must be >= 0: {self.press_depth_mm}")
        if self.servo_min_deg >= self.servo_max_deg:
            raise InputError("servo_min_deg must be below servo_max_deg")

    @property
    def motor_positions(self) -> tuple[tuple[float, float], tuple[float, float]]:
        half = self.base_separation_mm / 2.0
        return (-half, 0.0), (half, 0.0)

    def contact_point(self, position_mm: float, pressure: float = 0.0, gain: float = 1.0) -> tuple[float, float]:
        """Planar tip target for a strip position and press depth."""
        return (
            self.contact_x0_mm + position_mm,
            self.contact_y_mm + self.press_depth_mm * gain * pressure,
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "LinkageGeometry":
        try:
            raw = json.loads(Path(path).read_text())
            geometry = cls(
                base_separation_mm=float(raw["base_separation_mm"]),
                proximal_link_mm=tuple(float(v) for v in raw["proximal_link_mm"]),
                distal_link_mm=tuple(float(v) for v in raw["distal_link_mm"]),
                contact_x0_mm=float(raw["contact_x0_mm"]),
                contact_y_mm=float(raw["contact_y_mm"]),
                press_depth_mm=float(raw["press_depth_mm"]),
                servo_min_deg=float(raw.get("servo_min_deg", -30.0)),
                servo_max_deg=float(raw.get("servo_max_deg", 210.0)),
            )
        except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"bad linkage geometry file {path}: {exc}") from exc
        validate_geometry(geometry)
        return geometry

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(
                {
                    "base_separation_mm": self.base_separation_mm,
                    "proximal_link_mm": list(self.proximal_link_mm),
                    "distal_link_mm": list(self.distal_link_mm),
                    "contact_x0_mm": self.contact_x0_mm,
                    "contact_y_mm": self.contact_y_mm,
                    "press_depth_mm": self.press_depth_mm,
                    "servo_min_deg": self.servo_min_deg,
                    "servo_max_deg": self.servo_max_deg,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )


@dataclass(frozen=True)
class Calibration:
    """Per-temple fit corrections.

    pressure_gain scales press depth (skin stiffness varies), and
    position_offset_mm shifts the strip mapping (glasses never sit
    perfectly symmetric). Keys are temples.
    """

    pressure_gain: dict[Temple, float] = field(
        default_factory=lambda: {Temple.LEFT: 1.0, Temple.RIGHT: 1.0}
    )
    position_offset_mm: dict[Temple, float] = field(
        default_factory=lambda: {Temple.LEFT: 0.0, Temple.RIGHT: 0.0}
    )

    def __post_init__(self) -> None:
        for temple in Temple:
            gain = self.pressure_gain.get(temple)
            if gain is None or not 0.0 < gain <= 2.0:
                raise InputError(f"pressure gain for {temple.value} must be in (0, 2]: {gain}")
            if self.position_offset_mm.get(temple) is None:
                raise InputError(f"missing position offset for temple {temple.value}")

    @classmethod
    def from_json(cls, path: str | Path) -> "Calibration":
        try:
            raw = json.loads(Path(path).read_text())
            return cls(
                pressure_gain={Temple(k): float(v) for k, v in raw["pressure_gain"].items()},
                position_offset_mm={
                    Temple(k): float(v) for k, v in raw["position_offset_mm"].items()
                },
            )
        except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"bad calibration file {path}: {exc}") from exc

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(
                {
                    "pressure_gain": {t.value: g for t, g in self.pressure_gain.items()},
                    "position_offset_mm": {
                        t.value: o for t, o in self.position_offset_mm.items()
                    },
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )


def forward_kinematics(
    angle1_deg: float, angle2_deg: float, geometry: LinkageGeometry
) -> tuple[float, float]:
    """Tip position for given servo angles.

    The two distal links constrain the tip to the intersection of two
    circles around the elbows; of the two intersections the mechanism is
    assembled on the +y branch, so that one is returned. Raises
    KinematicsError when the circles do not meet (the angles describe a
    pose the assembled linkage cannot take).
    """
    (m1, m2) = geometry.motor_positions
    l1a, l1b = geometry.proximal_link_mm
    l2a, l2b = geometry.distal_link_mm
    a1 = math.radians(angle1_deg)
    a2 = math.radians(angle2_deg)
    ex1, ey1 = m1[0] + l1a * math.cos(a1), m1[1] + l1a * math.sin(a1)
    ex2, ey2 = m2[0] + l1b * math.cos(a2), m2[1] + l1b * math.sin(a2)

    dx, dy = ex2 - ex1, ey2 - ey1
    d = math.hypot(dx, dy)
    if d < 1e-12:
        raise KinematicsError("elbows coincide; tip is undefined")
    if d > l2a + l2b or d < abs(l2a - l2b):
        raise KinematicsError(
            f"distal circles do not intersect (elbow gap {d:.3f} mm, links {l2a}/{l2b})"
        )
    # Standard two-circle intersection.
    a = (l2a * l2a - l2b * l2b + d * d) / (2.0 * d)
    h_sq = l2a * l2a - a * a
    h = math.sqrt(max(0.0, h_sq))
    mx, my = ex1 + a * dx / d, ey1 + a * dy / d
    ux, uy = dx / d, dy / d
    p_up = (mx - h * uy, my + h * ux)
    p_down = (mx + h * uy, my - h * ux)
    return p_up if p_up[1] >= p_down[1] else p_down


def _motor_angle(
    motor: tuple[float, float],
    proximal: float,
    distal: float,
    target: tuple[float, float],
    elbow_sign: float,
) -> float:
    """Shaft angle placing this motor's elbow for the tip target.

    elbow_sign picks the branch: +1 bends the elbow outward from the
    motor-target line (left motor), -1 inward (right motor), which keeps
    the two elbows spread apart over the whole workspace.
    """
    vx, vy = target[0] - motor[0], target[1] - motor[1]
    d = math.hypot(vx, vy)
    if d > proximal + distal or d < abs(proximal - distal):
        raise KinematicsError(
            f"target {target} is {d:.3f} mm from the motor, outside [{abs(proximal - distal):.3f}, {proximal + distal:.3f}]"
        )
    alpha = math.atan2(vy, vx)
    cos_beta = (proximal * proximal + d * d - distal * distal) / (2.0 * proximal * d)
    beta = math.acos(max(-1.0, min(1.0, cos_beta)))
    return math.degrees(alpha + elbow_sign * beta)


def inverse_kinematics(
    position_mm: float,
    geometry: LinkageGeometry,
    calibration: Calibration | None = None,
    temple: Temple = Temple.LEFT,
    pressure: float = 0.0,
) -> tuple[float, float]:
    """Servo angles placing the tip at a strip position and press depth.

    The calibration's position offset shifts where the strip position
    lands; the offset position must stay within the 70 mm strip. Raises
    KinematicsError for positions off the strip or outside the reachable
    workspace.
    """
    calibration = calibration or Calibration()
    offset = calibration.position_offset_mm[temple]
    effective = position_mm + offset
    if not 0.0 <= effective <= TEMPLE_SPAN_MM:
        raise KinematicsError(
            f"position {position_mm} mm with offset {offset} mm leaves the strip"
        )
    if not 0.0 <= pressure <= 1.0:
        raise InputError(f"pressure out of [0, 1]: {pressure}")
    target = geometry.contact_point(effective, pressure, calibration.pressure_gain[temple])
    (m1, m2) = geometry.motor_positions
    l1a, l1b = geometry.proximal_link_mm
    l2a, l2b = geometry.distal_link_mm
    angle1 = _motor_angle(m1, l1a, l2a, target, elbow_sign=+1.0)
    angle2 = _motor_angle(m2, l1b, l2b, target, elbow_sign=-1.0)
    return angle1, angle2


def validate_geometry(
    geometry: LinkageGeometry, calibration: Calibration | None = None, steps: int = 71
) -> None:
    """Check the whole strip is reachable within servo limits.

    Sweeps the strip at zero and full pressure, runs IK, and confirms the
    resulting angles stay inside the configured servo range. Raises
    InputError for a geometry that cannot serve the pattern vocabulary.
    """
    calibration = calibration or Calibration()
    for temple in Temple:
        for i in range(steps):
            position = TEMPLE_SPAN_MM * i / (steps - 1)
            for pressure in (0.0, 1.0):
                try:
                    a1, a2 = inverse_kinematics(position, geometry, calibration, temple, pressure)
                except KinematicsError as exc:
                    raise InputError(
                        f"geometry cannot reach {position:.1f} mm at pressure {pressure}: {exc}"
                    ) from exc
                for angle in (a1, a2):
                    if not geometry.servo_min_deg <= angle <= geometry.servo_max_deg:
                        raise InputError(
                            f"servo angle {angle:.1f} deg at {position:.1f} mm exceeds "
                            f"[{geometry.servo_min_deg}, {geometry.servo_max_deg}]"
                        )
