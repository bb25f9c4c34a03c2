"""Synthetic detector: what the glasses camera would report.

Projects the room's obstacle cylinders through a pinhole model into
normalized bounding boxes. The vertical focal length is shared with the
CameraModel used for ranging, and boxes keep full float precision, so
monocular distance estimates invert the projection exactly; simulator
studies then isolate decision logic from ranging noise. Obstacles beyond
the detection range or outside the horizontal field of view are dropped,
and an obstacle whose angular extent is fully covered by a nearer, taller
one is culled as occluded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InputError
from ..navigator import Pose, normalize_heading
from ..perception import BBox, CameraModel, Detection, DetectionFrame
from .environment import Environment, PlacedObstacle


@dataclass(frozen=True)
class SyntheticCameraConfig:
    """Imaging model of the simulated glasses.

    The camera sits at eye height, looks along the wearer's heading, and
    in this anamorphic model uses the horizontal focal length implied by
    fov_h_deg and a separate, deliberately short vertical focal length
    (vertical_focal_px) so that nearby obstacles still fit the frame.
    """

    image_width_px: int = 640
    image_height_px: int = 480
    fov_h_deg: float = 60.0
    vertical_focal_px: float = 120.0
    camera_height_m: float = 1.5
    max_range_m: float = 5.0
    min_range_m: float = 0.2
    detection_confidence: float = 0.9

    def __post_init__(self) -> None:
        if self.image_width_px <= 0 or self.image_height_px <= 0:
            raise InputError("image size must be positive")
        if not 0 < self.fov_h_deg < 180:
            raise InputError(f"fov_h_deg out of (0, 180): {self.fov_h_deg}")
        if self.vertical_focal_px <= 0 or self.camera_height_m <= 0:
            raise InputError("focal length and camera height must be positive")
        if not 0 < self.min_range_m < self.max_range_m:
            raise InputError("need 0 < min_range_m < max_range_m")
        if not 0 < self.detection_confidence <= 1:
            raise InputError("detection confidence must be in (0, 1]")

    @property
    def horizontal_focal_px(self) -> float:
        return (self.image_width_px / 2.0) / math.tan(math.radians(self.fov_h_deg / 2.0))

    def ranging_model(self, environment: Environment) -> CameraModel:
        """CameraModel whose priors are the true obstacle heights.

        Labels must be consistent: one label, one height. This is what
        makes the simulator's distance estimates exact.
        """
        priors: dict[str, float] = {}
        obstacles = list(environment.static_obstacles) + list(environment.dynamic_obstacles)
        for o in obstacles:
            known = priors.get(o.label)
            if known is not None and abs(known - o.height_m) > 1e-9:
                raise InputError(
                    f"label {o.label!r} has two heights ({known} and {o.height_m}); "
                    "ranging priors would be wrong for one of them"
                )
            priors[o.label] = o.height_m
        return CameraModel(
            focal_length_px=self.vertical_focal_px, class_height_priors_m=priors
        )


@dataclass(frozen=True)
class VisibleObject:
    """Ground truth for one rendered detection."""

    label: str
    distance_m: float
    azimuth_deg: float  # positive to the wearer's left
    height_m: float


def _angular_halfwidth_deg(obstacle_radius_m: float, distance_m: float) -> float:
    return math.degrees(math.atan2(obstacle_radius_m, distance_m))


def synth_camera(
    environment: Environment,
    pose: Pose,
    config: SyntheticCameraConfig = SyntheticCameraConfig(),
    t_s: float = 0.0,
    frame_id: int = 0,
) -> tuple[DetectionFrame, list[VisibleObject]]:
    """Render one detection frame from a pose.

    Returns the frame plus the ground-truth list of what it shows, sorted
    nearest first. Detections are exact: no jitter, fixed confidence.
    """
    half_fov = config.fov_h_deg / 2.0
    candidates: list[tuple[PlacedObstacle, float, float]] = []
    for obstacle in environment.obstacles_at(t_s):
        dx = obstacle.x_m - pose.x_m
        dy = obstacle.y_m - pose.y_m
        distance = math.hypot(dx, dy)
        if distance < config.min_range_m or distance > config.max_range_m:
            continue
        azimuth = normalize_heading(math.degrees(math.atan2(dy, dx)) - pose.heading_deg)
        if abs(azimuth) > half_fov:
            continue
        candidates.append((obstacle, distance, azimuth))
    candidates.sort(key=lambda c: c[1])

    visible: list[tuple[PlacedObstacle, float, float]] = []
    for obstacle, distance, azimuth in candidates:
        half_width = _angular_halfwidth_deg(obstacle.radius_m, distance)
        lo, hi = azimuth - half_width, azimuth + half_width
        occluded = False
        for front, front_distance, front_azimuth in visible:
            if front.height_m + 1e-9 < obstacle.height_m:
                continue
            front_half = _angular_halfwidth_deg(front.radius_m, front_distance)
            if front_azimuth - front_half <= lo and hi <= front_azimuth + front_half:
                occluded = True
                break
        if not occluded:
            visible.append((obstacle, distance, azimuth))

    fx = config.horizontal_focal_px
    fy = config.vertical_focal_px
    width = float(config.image_width_px)
    height = float(config.image_height_px)
    detections = []
    truth = []
    for obstacle, distance, azimuth in visible:
        # Horizontal: project the azimuth; x grows rightward, azimuth
        # grows leftward, hence the sign.
        x_center = width / 2.0 - fx * math.tan(math.radians(azimuth))
        half_w = fx * obstacle.radius_m / distance
        x_min = max(0.0, x_center - half_w)
        x_max = min(width, x_center + half_w)
        if x_max - x_min < 1.0:
            continue
        # Vertical: object base on the ground, camera at eye height.
        h_px = fy * obstacle.height_m / distance
        y_bottom = height / 2.0 + fy * config.camera_height_m / distance
        if h_px >= height:
            h_px = height
            y_bottom = height
        elif y_bottom > height:
            # Shift the box up into frame, preserving its height (a real
            # detector boxes what it sees of a close object near the
            # frame bottom); height is what ranging relies on.
            y_bottom = height
        y_top = y_bottom - h_px
        if y_top < 0.0:
            y_top = 0.0
            y_bottom = max(y_bottom, h_px)

        detections.append(
            Detection(
                label=obstacle.label,
                bbox=BBox(x_min / width, y_top / height, x_max / width, y_bottom / height),
                confidence=config.detection_confidence,
            )
        )
        truth.append(
            VisibleObject(
                label=obstacle.label,
                distance_m=distance,
                azimuth_deg=azimuth,
                height_m=obstacle.height_m,
            )
        )

    frame = DetectionFrame(
        frame_id=frame_id,
        timestamp_ms=int(round(t_s * 1000.0)),
        image_width_px=config.image_width_px,
        image_height_px=config.image_height_px,
        detections=tuple(detections),
    )
    return frame, truth


def column_boundary_azimuth_deg(config: SyntheticCameraConfig = SyntheticCameraConfig()) -> float:
    """Azimuth (absolute) where a centroid crosses between grid columns.

    A point at image x = W/3 (or 2W/3) sits at this azimuth; scene
    designers keep obstacles clear of it so grid cells are unambiguous.
    """
    x_offset = config.image_width_px / 2.0 - config.image_width_px / 3.0
    return math.degrees(math.atan2(x_offset, config.horizontal_focal_px))
