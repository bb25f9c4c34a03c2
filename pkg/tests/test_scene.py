"""Window consolidation, persistence filtering, and hazard flagging."""
from __future__ import annotations

import numpy as np
import pytest

from hapticnav.errors import InputError
from hapticnav.perception import BBox, Column, GridCell, Row, SpatialObject, score_priority
from hapticnav.scene import (
    HAZARD_CELL,
    ConsolidatedObject,
    SceneSummary,
    SceneWindow,
    flag_hazards,
    summarize,
)

BOX = BBox(0.45, 0.55, 0.55, 0.75)


def obj(label: str, cell: GridCell, distance: float | None) -> SpatialObject:
    return SpatialObject(
        label=label,
        cell=cell,
        distance_m=distance,
        priority=score_priority(cell, distance),
        confidence=0.9,
        bbox=BOX,
    )


BC = GridCell(Row.BOTTOM, Column.CENTER)
BL = GridCell(Row.BOTTOM, Column.LEFT)
TR = GridCell(Row.TOP, Column.RIGHT)


def test_persistence_filter_keeps_only_stable_objects():
    window = SceneWindow(capacity=5)
    for i in range(5):
        objects = [obj("person", BC, 2.0)]
        if i in (0, 3):  # flickering chair, seen twice
            objects.append(obj("chair", BL, 1.5))
        window.push(i, objects)
    summary = window.consolidate(persistence_k=3)
    assert [o.label for o in summary.objects] == ["person"]
    assert summary.objects[0].persistence_count == 5
    assert summary.window_span == (0, 4)


def test_objects_matched_by_label_and_cell():
    # The same label in two different cells is two objects; only the one
    # that persists survives.
    window = SceneWindow(capacity=5)
    for i in range(5):
        cell = BC if i < 3 else TR
        window.push(i, [obj("person", cell, 2.0)])
    summary = window.consolidate(persistence_k=3)
    assert len(summary.objects) == 1
    assert summary.objects[0].cell == BC
    assert summary.objects[0].persistence_count == 3


def test_distance_is_median_of_observations():
    window = SceneWindow(capacity=5)
    for i, d in enumerate([2.0, 8.0, 2.2]):
        window.push(i, [obj("person", BC, d)])
    summary = window.consolidate(persistence_k=3)
    assert summary.objects[0].distance_m == pytest.approx(2.2)
    # Priority recomputed from the median, not from any single frame.
    assert summary.objects[0].priority == pytest.approx(2.0 + 1.5 + 1 / 2.2)


def test_median_uses_every_observation_even_with_gaps():
    # Unranged observations do not contribute to the median but do count
    # toward persistence.
    window = SceneWindow(capacity=5)
    distances = [1.0, None, 3.0]
    for i, d in enumerate(distances):
        window.push(i, [obj("person", BC, d)])
    summary = window.consolidate(persistence_k=3)
    assert summary.objects[0].distance_m == pytest.approx(2.0)
    assert summary.objects[0].persistence_count == 3


def test_unranged_object_consolidates_with_none_distance():
    window = SceneWindow(capacity=3)
    for i in range(3):
        window.push(i, [obj("banner", TR, None)])
    summary = window.consolidate(persistence_k=3)
    assert summary.objects[0].distance_m is None
    assert summary.objects[0].priority == pytest.approx(1.0 + 1.0)


def test_window_evicts_oldest_frame():
    window = SceneWindow(capacity=3)
    window.push(0, [obj("chair", BL, 1.5)])
    for i in range(1, 4):
        window.push(i, [obj("person", BC, 2.0)])
    summary = window.consolidate(persistence_k=1)
    assert [o.label for o in summary.objects] == ["person"]
    assert summary.window_span == (1, 3)


def test_push_rejects_non_increasing_frame_ids():
    window = SceneWindow(capacity=3)
    window.push(5, [])
    with pytest.raises(InputError):
        window.push(5, [])
    with pytest.raises(InputError):
        window.push(4, [])


def test_consolidate_validates_persistence_k():
    window = SceneWindow(capacity=3)
    window.push(0, [])
    with pytest.raises(InputError):
        window.consolidate(persistence_k=0)
    with pytest.raises(InputError):
        window.consolidate(persistence_k=4)


def test_empty_window_yields_empty_summary():
    summary = SceneWindow(capacity=5).consolidate(persistence_k=3)
    assert summary.objects == ()
    assert summary.window_span == (-1, -1)


def test_duplicate_key_in_one_frame_counts_once_for_persistence():
    window = SceneWindow(capacity=3)
    for i in range(2):
        window.push(i, [obj("person", BC, 2.0), obj("person", BC, 4.0)])
    summary = window.consolidate(persistence_k=2)
    assert summary.objects[0].persistence_count == 2
    # All four observations feed the median: [2, 2, 4, 4] -> 3.
    assert summary.objects[0].distance_m == pytest.approx(3.0)


# --- hazard flagging -------------------------------------------------------


def consolidated(cell: GridCell, distance: float | None) -> ConsolidatedObject:
    return ConsolidatedObject(
        label="person",
        cell=cell,
        distance_m=distance,
        persistence_count=3,
        priority=score_priority(cell, distance),
    )


def test_hazard_requires_bottom_center_and_proximity():
    summary = SceneSummary(
        objects=(
            consolidated(BC, 0.8),
            consolidated(BC, 1.0),
            consolidated(BL, 0.5),
            consolidated(BC, None),
        ),
        window_span=(0, 4),
    )
    flagged = flag_hazards(summary)
    assert [o.immediate_hazard for o in flagged.objects] == [True, False, False, False]
    assert [o.label for o in flagged.hazards()] == ["person"]


def test_hazard_boundary_is_strict():
    at_limit = SceneSummary(objects=(consolidated(BC, 1.0),), window_span=(0, 0))
    just_inside = SceneSummary(objects=(consolidated(BC, 0.999),), window_span=(0, 0))
    assert flag_hazards(at_limit).hazards() == ()
    assert len(flag_hazards(just_inside).hazards()) == 1


def test_hazard_biconditional_over_random_summaries():
    # For any consolidated object: hazard iff bottom-center and d < 1.0.
    rng = np.random.default_rng(42)
    cells = [GridCell(r, c) for r in Row for c in Column]
    for _ in range(500):
        objects = tuple(
            consolidated(
                cells[rng.integers(len(cells))],
                None if rng.random() < 0.15 else float(rng.uniform(0.05, 5.0)),
            )
            for _ in range(rng.integers(0, 6))
        )
        flagged = flag_hazards(SceneSummary(objects=objects, window_span=(0, 4)))
        for o in flagged.objects:
            expected = o.cell == HAZARD_CELL and o.distance_m is not None and o.distance_m < 1.0
            assert o.immediate_hazard == expected


def test_flag_hazards_respects_custom_distance():
    summary = SceneSummary(objects=(consolidated(BC, 1.4),), window_span=(0, 0))
    assert flag_hazards(summary, hazard_distance_m=1.5).hazards() != ()
    with pytest.raises(InputError):
        flag_hazards(summary, hazard_distance_m=0.0)


def test_summarize_pipeline_flags_persistent_near_object():
    window = SceneWindow(capacity=5)
    for i in range(5):
        window.push(i, [obj("person", BC, 0.7), obj("chair", TR, 3.0)])
    summary = summarize(window, persistence_k=3)
    assert [o.immediate_hazard for o in summary.objects] == [True, False]


def test_summary_json_round_trip():
    window = SceneWindow(capacity=5)
    for i in range(5):
        window.push(i, [obj("person", BC, 0.7), obj("banner", TR, None)])
    summary = summarize(window)
    raw = summary.to_dict()
    assert SceneSummary.from_dict(raw) == summary
