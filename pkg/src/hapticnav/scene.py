"""Multi-frame scene consolidation.

Single frames flicker: detectors drop objects for a frame or two and
distance estimates jitter. A sliding window over the last N mapped frames
keeps only objects seen in at least k frames (matched by label and grid
cell) and reports the median of their distance estimates. Objects sitting
in the bottom-center cell nearer than the hazard distance are flagged as
immediate hazards.
"""
from __future__ import annotations

import json
import statistics
from collections import deque
from dataclasses import dataclass, replace

from .errors import InputError
from .perception import Column, GridCell, Row, SpatialObject, score_priority

HAZARD_DISTANCE_M = 1.0
HAZARD_CELL = GridCell(Row.BOTTOM, Column.CENTER)


@dataclass(frozen=True)
class ConsolidatedObject:
    """An object that persisted across the window.

    Attributes:
        label: Detector class name.
        cell: Grid cell it was matched in.
        distance_m: Median of the window's distance estimates, or None
            when the class is unranged.
        persistence_count: Number of window frames it appeared in.
        priority: Score recomputed from the median distance.
        immediate_hazard: True once flagged by flag_hazards.
    """

    label: str
    cell: GridCell
    distance_m: float | None
    persistence_count: int
    priority: float
    immediate_hazard: bool = False

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "cell": self.cell.label(),
            "distance_m": self.distance_m,
            "persistence_count": self.persistence_count,
            "priority": self.priority,
            "immediate_hazard": self.immediate_hazard,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ConsolidatedObject":
        try:
            return cls(
                label=str(raw["label"]),
                cell=GridCell.from_label(raw["cell"]),
                distance_m=None if raw["distance_m"] is None else float(raw["distance_m"]),
                persistence_count=int(raw["persistence_count"]),
                priority=float(raw["priority"]),
                immediate_hazard=bool(raw.get("immediate_hazard", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad consolidated object: {exc}") from exc


@dataclass(frozen=True)
class SceneSummary:
    """The consolidated picture over one window.

    window_span is the (first, last) frame id the summary covers, or
    (-1, -1) for a summary taken from an empty window.
    """

    objects: tuple[ConsolidatedObject, ...]
    window_span: tuple[int, int]

    def hazards(self) -> tuple[ConsolidatedObject, ...]:
        return tuple(o for o in self.objects if o.immediate_hazard)

    def to_dict(self) -> dict:
        return {
            "objects": [o.to_dict() for o in self.objects],
            "window_span": list(self.window_span),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, raw: dict) -> "SceneSummary":
        try:
            span = raw["window_span"]
            return cls(
                objects=tuple(ConsolidatedObject.from_dict(o) for o in raw["objects"]),
                window_span=(int(span[0]), int(span[1])),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError(f"bad scene summary: {exc}") from exc


class SceneWindow:
    """Sliding buffer of the most recent mapped frames."""

    def __init__(self, capacity: int = 5):
        if capacity < 1:
            raise InputError(f"window capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._frames: deque[tuple[int, tuple[SpatialObject, ...]]] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._frames)

    @property
    def last_frame_id(self) -> int | None:
        return self._frames[-1][0] if self._frames else None

    def push(self, frame_id: int, objects: list[SpatialObject]) -> None:
        """Append one mapped frame; frame ids must strictly increase."""
        last = self.last_frame_id
        if last is not None and frame_id <= last:
            raise InputError(f"frame id {frame_id} not after {last}")
        self._frames.append((frame_id, tuple(objects)))

    def consolidate(self, persistence_k: int = 3) -> SceneSummary:
        """Merge the window into one summary.

        Objects are matched across frames by (label, cell). Only those
        present in at least persistence_k distinct frames are kept. The
        reported distance is the median over every observation with a
        known distance; priority is recomputed from that median.
        """
        if not 1 <= persistence_k <= self.capacity:
            raise InputError(
                f"persistence_k must be in [1, {self.capacity}], got {persistence_k}"
            )
        if not self._frames:
            return SceneSummary(objects=(), window_span=(-1, -1))

        frame_counts: dict[tuple[str, GridCell], int] = {}
        distances: dict[tuple[str, GridCell], list[float]] = {}
        for _, objects in self._frames:
            seen_this_frame: set[tuple[str, GridCell]] = set()
            for obj in objects:
                key = (obj.label, obj.cell)
                if key not in seen_this_frame:
                    frame_counts[key] = frame_counts.get(key, 0) + 1
                    seen_this_frame.add(key)
                if obj.distance_m is not None:
                    distances.setdefault(key, []).append(obj.distance_m)

        merged = []
        for (label, cell), count in frame_counts.items():
            if count < persistence_k:
                continue
            observed = distances.get((label, cell))
            median = statistics.median(observed) if observed else None
            merged.append(
                ConsolidatedObject(
                    label=label,
                    cell=cell,
                    distance_m=median,
                    persistence_count=count,
                    priority=score_priority(cell, median),
                )
            )
        merged.sort(
            key=lambda o: (
                -o.priority,
                o.distance_m if o.distance_m is not None else float("inf"),
                o.label,
            )
        )
        return SceneSummary(
            objects=tuple(merged),
            window_span=(self._frames[0][0], self._frames[-1][0]),
        )


def flag_hazards(
    summary: SceneSummary, hazard_distance_m: float = HAZARD_DISTANCE_M
) -> SceneSummary:
    """Mark bottom-center objects nearer than the hazard distance.

    Objects with unknown distance are never flagged.
    """
    if not hazard_distance_m > 0:
        raise InputError(f"hazard distance must be positive: {hazard_distance_m}")
    flagged = tuple(
        replace(
            obj,
            immediate_hazard=(
                obj.cell == HAZARD_CELL
                and obj.distance_m is not None
                and obj.distance_m < hazard_distance_m
            ),
        )
        for obj in summary.objects
    )
    return SceneSummary(objects=flagged, window_span=summary.window_span)


def summarize(
    window: SceneWindow,
    persistence_k: int = 3,
    hazard_distance_m: float = HAZARD_DISTANCE_M,
) -> SceneSummary:
    """Consolidate and hazard-flag in one step."""
    return flag_hazards(window.consolidate(persistence_k), hazard_distance_m)
