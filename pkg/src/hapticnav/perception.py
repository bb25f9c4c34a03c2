"""Object detections to coarse spatial cells.

A detection frame is reduced to a 2x3 occupancy picture of the space in
front of the wearer: two rows (bottom half of the image is near ground,
top half is head height) by three columns (left, center, right thirds).
Each retained detection also gets a monocular distance estimate from a
per-class height prior and a scalar priority used to order objects when
the scene is described to a command policy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .errors import InputError


class Row(Enum):
    """Vertical half of the image a detection centroid falls in."""

    TOP = "top"
    BOTTOM = "bottom"


class Column(Enum):
    """Horizontal third of the image a detection centroid falls in."""

    LEFT = "left"
    CENTER = "center"
    RIGHT = "right"


@dataclass(frozen=True)
class GridCell:
    """One of the six cells of the 2x3 spatial grid."""

    row: Row
    column: Column

    def label(self) -> str:
        return f"{self.row.value}-{self.column.value}"

    @classmethod
    def from_label(cls, text: str) -> "GridCell":
        try:
            row_text, col_text = text.split("-", 1)
            return cls(Row(row_text), Column(col_text))
        except ValueError as exc:
            raise InputError(f"not a grid cell label: {text!r}") from exc


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in normalized image coordinates.

    All four values are fractions of the image size, so the box is
    resolution independent. x grows rightward, y grows downward.
    """

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        for name in ("x_min", "y_min", "x_max", "y_max"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InputError(f"bbox {name} must be finite, got {v!r}")
            if not 0.0 <= v <= 1.0:
                raise InputError(f"bbox {name} out of [0, 1]: {v}")
        if self.x_max <= self.x_min:
            raise InputError(f"bbox has no width: x [{self.x_min}, {self.x_max}]")
        if self.y_max <= self.y_min:
            raise InputError(f"bbox has no height: y [{self.y_min}, {self.y_max}]")

    @property
    def centroid(self) -> tuple[float, float]:
        return (self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass(frozen=True)
class Detection:
    """A single detector output inside one frame.

    Attributes:
        label: Class name as the detector reports it, e.g. "person".
        bbox: Normalized box around the object.
        confidence: Detector score in [0, 1].
    """

    label: str
    bbox: BBox
    confidence: float

    def __post_init__(self) -> None:
        if not self.label:
            raise InputError("detection label must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise InputError(f"confidence out of [0, 1]: {self.confidence}")


@dataclass(frozen=True)
class DetectionFrame:
    """All detections from one camera image.

    Attributes:
        frame_id: Monotonically increasing identifier within a stream.
        timestamp_ms: Capture time in milliseconds.
        image_width_px: Source image width, pixels.
        image_height_px: Source image height, pixels.
        detections: Detector outputs, any order.
    """

    frame_id: int
    timestamp_ms: int
    image_width_px: int
    image_height_px: int
    detections: tuple[Detection, ...] = ()

    def __post_init__(self) -> None:
        if self.image_width_px <= 0 or self.image_height_px <= 0:
            raise InputError(
                f"image size must be positive, got "
                f"{self.image_width_px}x{self.image_height_px}"
            )


@dataclass(frozen=True)
class CameraModel:
    """Vertical intrinsics and class height priors for monocular ranging.

    Attributes:
        focal_length_px: Vertical focal length in pixels.
        class_height_priors_m: Physical height in meters assumed for each
            detector class. Classes absent from this mapping cannot be
            ranged and keep distance None.
    """

    focal_length_px: float
    class_height_priors_m: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.focal_length_px > 0:
            raise InputError(f"focal length must be positive: {self.focal_length_px}")
        for label, h in self.class_height_priors_m.items():
            if not h > 0:
                raise InputError(f"height prior for {label!r} must be positive: {h}")

    @classmethod
    def from_json(cls, path: str | Path) -> "CameraModel":
        try:
            raw = json.loads(Path(path).read_text())
            return cls(
                focal_length_px=float(raw["focal_length_px"]),
                class_height_priors_m={
                    str(k): float(v)
                    for k, v in raw.get("class_height_priors_m", {}).items()
                },
            )
        except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"bad camera model file {path}: {exc}") from exc

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(
                {
                    "focal_length_px": self.focal_length_px,
                    "class_height_priors_m": self.class_height_priors_m,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )


@dataclass(frozen=True)
class SpatialObject:
    """A detection after grid mapping and ranging.

    Attributes:
        label: Detector class name.
        cell: Grid cell the centroid falls in.
        distance_m: Estimated distance, or None when the class has no
            height prior.
        priority: Ordering score; larger means mention first.
        confidence: Detector score carried through from the detection.
        bbox: Original normalized box.
    """

    label: str
    cell: GridCell
    distance_m: float | None
    priority: float
    confidence: float
    bbox: BBox


# Grid geometry. Column edges at thirds, row edge at the vertical middle.
# Intervals are half open [lo, hi) except the last, which closes at 1.0,
# so every centroid lands in exactly one cell.
_COLUMN_EDGES = (1.0 / 3.0, 2.0 / 3.0)


def assign_cell(bbox: BBox) -> GridCell:
    """Map the centroid of a normalized box to its grid cell."""
    cx, cy = bbox.centroid
    if cx < _COLUMN_EDGES[0]:
        column = Column.LEFT
    elif cx < _COLUMN_EDGES[1]:
        column = Column.CENTER
    else:
        column = Column.RIGHT
    row = Row.TOP if cy < 0.5 else Row.BOTTOM
    return GridCell(row, column)


def estimate_distance(
    detection: Detection, frame: DetectionFrame, camera: CameraModel
) -> float | None:
    """Range a detection from its pixel height and a class height prior.

    Uses the pinhole relation distance = focal * real_height / pixel_height.
    Returns None when the class has no prior.
    """
    prior = camera.class_height_priors_m.get(detection.label)
    if prior is None:
        return None
    height_px = detection.bbox.height * frame.image_height_px
    if height_px <= 0:
        raise InputError(f"degenerate bbox height {height_px} px")
    return camera.focal_length_px * prior / height_px


# Priority weights. Bottom row is near ground (walking hazard), center
# column is on the travel axis, and nearer objects get up to 2.0 extra.
_ROW_WEIGHT = {Row.BOTTOM: 2.0, Row.TOP: 1.0}
_COLUMN_WEIGHT = {Column.CENTER: 1.5, Column.LEFT: 1.0, Column.RIGHT: 1.0}
_PROXIMITY_CAP = 2.0


def score_priority(cell: GridCell, distance_m: float | None) -> float:
    """Score an object for mention order: row weight + column weight + proximity.

    Proximity is 1/distance clamped to 2.0, or 0 when distance is unknown.
    """
    proximity = 0.0
    if distance_m is not None:
        if distance_m <= 0:
            raise InputError(f"distance must be positive: {distance_m}")
        proximity = min(_PROXIMITY_CAP, 1.0 / distance_m)
    return _ROW_WEIGHT[cell.row] + _COLUMN_WEIGHT[cell.column] + proximity


def map_frame(
    frame: DetectionFrame,
    camera: CameraModel,
    min_confidence: float = 0.25,
) -> list[SpatialObject]:
    """Convert one frame into prioritized spatial objects.

    Detections under min_confidence are dropped. The result is sorted by
    priority descending; ties break by distance ascending (unknown
    distances last), then label, so output order is deterministic.
    """
    objects: list[SpatialObject] = []
    for det in frame.detections:
        if det.confidence < min_confidence:
            continue
        cell = assign_cell(det.bbox)
        distance = estimate_distance(det, frame, camera)
        objects.append(
            SpatialObject(
                label=det.label,
                cell=cell,
                distance_m=distance,
                priority=score_priority(cell, distance),
                confidence=det.confidence,
                bbox=det.bbox,
            )
        )
    objects.sort(
        key=lambda o: (
            -o.priority,
            o.distance_m if o.distance_m is not None else math.inf,
            o.label,
        )
    )
    return objects


# ---------------------------------------------------------------------------
# Detection log serialization: one JSON object per line, one line per frame.


@dataclass
class LogDiagnostic:
    """A recoverable problem found while reading a detection log."""

    line_number: int
    message: str


def frame_to_dict(frame: DetectionFrame) -> dict:
    return {
        "frame_id": frame.frame_id,
        "timestamp_ms": frame.timestamp_ms,
        "image_width_px": frame.image_width_px,
        "image_height_px": frame.image_height_px,
        "detections": [
            {
                "label": d.label,
                "bbox": d.bbox.as_list(),
                "confidence": d.confidence,
            }
            for d in frame.detections
        ],
    }


def frame_from_dict(raw: dict) -> DetectionFrame:
    """Build a frame from parsed JSON, raising InputError on any bad field."""
    try:
        detections_raw = raw.get("detections", [])
        if not isinstance(detections_raw, list):
            raise InputError(f"detections must be a list, got {type(detections_raw).__name__}")
        detections = []
        for i, d in enumerate(detections_raw):
            try:
                bbox_raw = d["bbox"]
                if not (isinstance(bbox_raw, list) and len(bbox_raw) == 4):
                    raise InputError(f"bbox must be a 4-element list, got {bbox_raw!r}")
                detections.append(
                    Detection(
                        label=str(d["label"]),
                        bbox=BBox(*(float(v) for v in bbox_raw)),
                        confidence=float(d["confidence"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"detection {i}: {exc}") from exc
        return DetectionFrame(
            frame_id=int(raw["frame_id"]),
            timestamp_ms=int(raw["timestamp_ms"]),
            image_width_px=int(raw["image_width_px"]),
            image_height_px=int(raw["image_height_px"]),
            detections=tuple(detections),
        )
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def read_detection_log(
    path: str | Path,
    strict: bool = False,
    diagnostics: list[LogDiagnostic] | None = None,
) -> Iterator[DetectionFrame]:
    """Yield frames from a JSON-lines detection log.

    Malformed lines are skipped with a diagnostic (line number plus reason)
    unless strict is set, in which case the first problem raises InputError.
    Blank lines are ignored.
    """
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                if not isinstance(raw, dict):
                    raise InputError(f"expected a JSON object, got {type(raw).__name__}")
                yield frame_from_dict(raw)
            except (json.JSONDecodeError, InputError) as exc:
                if strict:
                    raise InputError(f"{path}:{line_number}: {exc}") from exc
                if diagnostics is not None:
                    diagnostics.append(LogDiagnostic(line_number, str(exc)))


def write_detection_log(frames: Iterable[DetectionFrame], path: str | Path) -> None:
    """Write frames as a JSON-lines detection log."""
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            fh.write(json.dumps(frame_to_dict(frame), sort_keys=True) + "\n")
