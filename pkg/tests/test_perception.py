"""Grid mapping, monocular ranging, priority scoring, and log round-trips."""
from __future__ import annotations

import json
import math

import numpy as np
import pytest

from hapticnav.errors import InputError
from hapticnav.perception import (
    BBox,
    CameraModel,
    Column,
    Detection,
    DetectionFrame,
    GridCell,
    LogDiagnostic,
    Row,
    assign_cell,
    estimate_distance,
    frame_from_dict,
    map_frame,
    read_detection_log,
    score_priority,
    write_detection_log,
)


def box_at(cx: float, cy: float, w: float = 0.1, h: float = 0.1) -> BBox:
    """Box with the given centroid, shrunk if needed to stay in frame."""
    x_min = max(0.0, cx - w / 2)
    x_max = min(1.0, cx + w / 2)
    y_min = max(0.0, cy - h / 2)
    y_max = min(1.0, cy + h / 2)
    # Re-center exactly by mirroring the clipped side.
    if x_max - x_min < w - 1e-9:
        if x_min == 0.0:
            x_max = 2 * cx
        else:
            x_min = 2 * cx - 1.0
    if y_max - y_min < h - 1e-9:
        if y_min == 0.0:
            y_max = 2 * cy
        else:
            y_min = 2 * cy - 1.0
    return BBox(x_min, y_min, x_max, y_max)


CAMERA = CameraModel(
    focal_length_px=500.0,
    class_height_priors_m={"person": 1.7, "chair": 0.9, "cup": 0.2},
)


def make_frame(detections, frame_id=0, width=640, height=480) -> DetectionFrame:
    return DetectionFrame(
        frame_id=frame_id,
        timestamp_ms=frame_id * 100,
        image_width_px=width,
        image_height_px=height,
        detections=tuple(detections),
    )


# --- grid assignment -------------------------------------------------------


@pytest.mark.parametrize(
    "cx,cy,row,column",
    [
        (0.1, 0.2, Row.TOP, Column.LEFT),
        (0.5, 0.2, Row.TOP, Column.CENTER),
        (0.9, 0.2, Row.TOP, Column.RIGHT),
        (0.1, 0.8, Row.BOTTOM, Column.LEFT),
        (0.5, 0.8, Row.BOTTOM, Column.CENTER),
        (0.9, 0.8, Row.BOTTOM, Column.RIGHT),
    ],
)
def test_assign_cell_interior(cx, cy, row, column):
    assert assign_cell(box_at(cx, cy)) == GridCell(row, column)


def test_assign_cell_boundaries_are_half_open():
    # A centroid exactly on an edge belongs to the cell on the far side.
    assert assign_cell(box_at(1.0 / 3.0, 0.5)) == GridCell(Row.BOTTOM, Column.CENTER)
    assert assign_cell(box_at(2.0 / 3.0, 0.25)) == GridCell(Row.TOP, Column.RIGHT)
    assert assign_cell(box_at(0.2, 0.5)) == GridCell(Row.BOTTOM, Column.LEFT)


def test_every_centroid_lands_in_exactly_one_cell():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        cx, cy = rng.uniform(0.02, 0.98, size=2)
        cell = assign_cell(box_at(float(cx), float(cy), w=0.02, h=0.02))
        # Reconstruct the expected cell the long way.
        col = Column.LEFT if cx < 1 / 3 else Column.CENTER if cx < 2 / 3 else Column.RIGHT
        row = Row.TOP if cy < 0.5 else Row.BOTTOM
        assert cell == GridCell(row, col)


def test_grid_cell_label_round_trip():
    for row in Row:
        for column in Column:
            cell = GridCell(row, column)
            assert GridCell.from_label(cell.label()) == cell
    with pytest.raises(InputError):
        GridCell.from_label("middle-everywhere")


# --- distance estimation ---------------------------------------------------


def test_estimate_distance_pinhole():
    # 1.7 m person, 170 px tall in a 480 px image, focal 500 px:
    # d = 500 * 1.7 / 170 = 5.0 m.
    det = Detection("person", BBox(0.4, 0.3, 0.6, 0.3 + 170 / 480), 0.9)
    frame = make_frame([det])
    d = estimate_distance(det, frame, CAMERA)
    assert d == pytest.approx(5.0, abs=1e-9)


def test_estimate_distance_halves_when_height_doubles():
    near = Detection("person", BBox(0.4, 0.1, 0.6, 0.1 + 340 / 480), 0.9)
    far = Detection("person", BBox(0.4, 0.3, 0.6, 0.3 + 170 / 480), 0.9)
    frame = make_frame([near, far])
    d_near = estimate_distance(near, frame, CAMERA)
    d_far = estimate_distance(far, frame, CAMERA)
    assert d_near == pytest.approx(d_far / 2.0, rel=1e-12)


def test_estimate_distance_without_prior_is_none():
    det = Detection("kite", box_at(0.5, 0.5), 0.9)
    assert estimate_distance(det, make_frame([det]), CAMERA) is None


# --- priority scoring ------------------------------------------------------


def test_score_priority_components():
    bottom_center = GridCell(Row.BOTTOM, Column.CENTER)
    # 2.0 (bottom) + 1.5 (center) + 1/2.0 = 4.0
    assert score_priority(bottom_center, 2.0) == pytest.approx(4.0)
    # Proximity term clamps at 2.0 for anything nearer than 0.5 m.
    assert score_priority(bottom_center, 0.1) == pytest.approx(5.5)
    assert score_priority(bottom_center, 0.5) == pytest.approx(5.5)
    # Unknown distance contributes nothing.
    assert score_priority(GridCell(Row.TOP, Column.LEFT), None) == pytest.approx(2.0)


def test_score_priority_orders_rows_and_columns():
    d = 2.0
    bc = score_priority(GridCell(Row.BOTTOM, Column.CENTER), d)
    bl = score_priority(GridCell(Row.BOTTOM, Column.LEFT), d)
    tc = score_priority(GridCell(Row.TOP, Column.CENTER), d)
    tl = score_priority(GridCell(Row.TOP, Column.LEFT), d)
    assert bc > bl > tl
    assert bc > tc > tl


def test_score_priority_rejects_nonpositive_distance():
    with pytest.raises(InputError):
        score_priority(GridCell(Row.TOP, Column.LEFT), 0.0)


# --- frame mapping ---------------------------------------------------------


def test_map_frame_orders_by_priority():
    h_near = 340 / 480  # person at 2.5 m: priority 2 + 1 + 0.4 = 3.4
    h_far = 85 / 480  # person at 10 m: priority 2 + 1.5 + 0.1 = 3.6
    frame = make_frame(
        [
            Detection("person", BBox(0.4, 0.5, 0.6, 0.5 + h_far), 0.9),
            Detection("person", BBox(0.05, 0.29, 0.25, 0.29 + h_near), 0.9),
            Detection("chair", box_at(0.5, 0.25), 0.9),
        ]
    )
    objects = map_frame(frame, CAMERA)
    assert [o.cell.label() for o in objects][:2] == ["bottom-center", "bottom-left"]
    assert objects[0].priority > objects[1].priority > objects[2].priority


def test_map_frame_tie_breaks_by_distance_then_label():
    # Two cups nearer than 0.5 m both hit the clamped proximity term, so
    # their priorities tie and the nearer one must still sort first.
    h_40cm = (500 * 0.2 / 0.40) / 480
    h_45cm = (500 * 0.2 / 0.45) / 480
    cup_far = Detection("cup", BBox(0.40, 0.52, 0.50, 0.52 + h_45cm), 0.9)
    cup_near = Detection("cup", BBox(0.52, 0.47, 0.62, 0.47 + h_40cm), 0.9)
    # Two classes without priors in one cell tie everywhere except label.
    banana = Detection("banana", box_at(0.2, 0.25), 0.9)
    apple = Detection("apple", box_at(0.15, 0.3), 0.9)

    for ordering in ([cup_far, cup_near, banana, apple], [apple, banana, cup_near, cup_far]):
        objects = map_frame(make_frame(ordering), CAMERA)
        assert [o.label for o in objects] == ["cup", "cup", "apple", "banana"]
        assert objects[0].distance_m == pytest.approx(0.40)
        assert objects[1].distance_m == pytest.approx(0.45)


def test_map_frame_drops_low_confidence():
    frame = make_frame(
        [
            Detection("person", box_at(0.5, 0.75, h=0.3), 0.24),
            Detection("chair", box_at(0.5, 0.75, h=0.3), 0.25),
        ]
    )
    objects = map_frame(frame, CAMERA)
    assert [o.label for o in objects] == ["chair"]


def test_map_frame_empty_frame():
    assert map_frame(make_frame([]), CAMERA) == []


# --- validation ------------------------------------------------------------


@pytest.mark.parametrize(
    "bbox",
    [
        (-0.1, 0.0, 0.5, 0.5),
        (0.0, 0.0, 1.2, 0.5),
        (0.5, 0.0, 0.5, 0.5),
        (0.0, 0.6, 0.5, 0.5),
        (0.0, math.nan, 0.5, 0.5),
    ],
)
def test_bbox_rejects_bad_coordinates(bbox):
    with pytest.raises(InputError):
        BBox(*bbox)


def test_detection_rejects_bad_confidence():
    with pytest.raises(InputError):
        Detection("person", box_at(0.5, 0.5), 1.5)


def test_frame_rejects_bad_image_size():
    with pytest.raises(InputError):
        DetectionFrame(0, 0, 0, 480)


def test_camera_model_rejects_bad_values():
    with pytest.raises(InputError):
        CameraModel(focal_length_px=0.0)
    with pytest.raises(InputError):
        CameraModel(focal_length_px=500.0, class_height_priors_m={"person": -1.0})


# --- log round trip --------------------------------------------------------


def sample_frames() -> list[DetectionFrame]:
    return [
        make_frame(
            [Detection("person", box_at(0.5, 0.7, h=0.3), 0.88)],
            frame_id=i,
        )
        for i in range(3)
    ]


def test_detection_log_round_trip(tmp_path):
    path = tmp_path / "log.ndjson"
    frames = sample_frames()
    write_detection_log(frames, path)
    assert list(read_detection_log(path)) == frames


def test_detection_log_skips_bad_lines_with_diagnostics(tmp_path):
    path = tmp_path / "log.ndjson"
    frames = sample_frames()
    write_detection_log(frames, path)
    lines = path.read_text().splitlines()
    lines.insert(1, "{not json")
    bad_frame = json.loads(lines[3])
    bad_frame["detections"][0]["confidence"] = 7.0
    lines[3] = json.dumps(bad_frame)
    lines.append("")
    path.write_text("\n".join(lines) + "\n")

    diagnostics: list[LogDiagnostic] = []
    got = list(read_detection_log(path, diagnostics=diagnostics))
    assert got == [frames[0], frames[1]]
    assert [d.line_number for d in diagnostics] == [2, 4]
    assert "confidence" in diagnostics[1].message


def test_detection_log_strict_raises_with_line_number(tmp_path):
    path = tmp_path / "log.ndjson"
    path.write_text('{"frame_id": 0}\n')
    with pytest.raises(InputError) as err:
        list(read_detection_log(path, strict=True))
    assert ":1:" in str(err.value)


def test_frame_from_dict_reports_detection_index():
    raw = {
        "frame_id": 0,
        "timestamp_ms": 0,
        "image_width_px": 640,
        "image_height_px": 480,
        "detections": [
            {"label": "person", "bbox": [0.1, 0.1, 0.2, 0.2], "confidence": 0.9},
            {"label": "person", "bbox": [0.1, 0.1], "confidence": 0.9},
        ],
    }
    with pytest.raises(InputError) as err:
        frame_from_dict(raw)
    assert "detection 1" in str(err.value)
