"""Decision scenes: geometric labels vs. the rendered pipeline."""
from __future__ import annotations

from importlib import resources

import pytest

from hapticnav.errors import InputError
from hapticnav.navigator import Pose
from hapticnav.policy import (
    DecisionSource,
    NavCommand,
    PolicyConfig,
    Sensitivity,
    load_transcript,
)
from hapticnav.sim.environment import Environment, StaticObstacle
from hapticnav.sim.scenarios import (
    OBSERVER_POSE,
    DecisionScenario,
    ScenarioKind,
    build_scenario,
    build_scenario_suite,
    bundled_suite,
    label_scene,
    record_transcript,
    run_decision_scenario,
    scene_summary,
)


def obstacle_ahead(d: float, label: str = "bin", h: float = 0.8, r: float = 0.08) -> Environment:
    return Environment(
        static_obstacles=(StaticObstacle(label, OBSERVER_POSE.x_m + d, OBSERVER_POSE.y_m, r, h),)
    )


class TestLabeler:
    def test_empty_room_is_forward(self):
        assert label_scene(Environment()) is NavCommand.FORWARD

    def test_clear_hazard_with_open_sides_is_left(self):
        assert label_scene(obstacle_ahead(0.7)) is NavCommand.LEFT

    def test_far_obstacle_is_forward(self):
        assert label_scene(obstacle_ahead(2.5)) is NavCommand.FORWARD

    def test_hazard_boundary_band_is_ambiguous(self):
        assert label_scene(obstacle_ahead(1.0)) is None
        assert label_scene(obstacle_ahead(0.95)) is None
        assert label_scene(obstacle_ahead(1.05)) is None

    def test_column_boundary_is_ambiguous(self):
        # x = W/3 sits at azimuth ~10.9 degrees; placing the centroid
        # there must refuse a label rather than guess a column.
        import math

        d = 2.0
        az = math.radians(10.894)
        env = Environment(
            static_obstacles=(
                StaticObstacle(
                    "bin",
                    OBSERVER_POSE.x_m + d * math.cos(az),
                    OBSERVER_POSE.y_m + d * math.sin(az),
                    0.08,
                    0.8,
                ),
            )
        )
        assert label_scene(env) is None

    def test_frame_filling_box_is_ambiguous(self):
        # Tall and close: the projected box would clip and ranging would
        # no longer invert, so the labeler refuses.
        assert label_scene(obstacle_ahead(0.42, label="person", h=1.7)) is None


class TestSuite:
    def test_build_is_deterministic(self):
        a = build_scenario(ScenarioKind.STATIC, 4)
        b = build_scenario(ScenarioKind.STATIC, 4)
        assert a.to_dict() == b.to_dict()

    def test_bundled_suite_matches_generator(self):
        rebuilt = build_scenario_suite()
        bundled = bundled_suite()
        assert len(bundled) == 60
        assert [s.to_dict() for s in rebuilt] == [s.to_dict() for s in bundled]

    def test_suite_covers_kinds_and_commands(self):
        suite = bundled_suite()
        kinds = {k: sum(1 for s in suite if s.kind is k) for k in ScenarioKind}
        assert kinds == {k: 20 for k in ScenarioKind}
        static_cmds = {s.expected for s in suite if s.kind is ScenarioKind.STATIC}
        dynamic_cmds = {s.expected for s in suite if s.kind is ScenarioKind.DYNAMIC}
        assert static_cmds == {NavCommand.LEFT, NavCommand.RIGHT, NavCommand.STOP}
        assert dynamic_cmds == set(NavCommand)
        assert all(
            s.expected is NavCommand.FORWARD for s in suite if s.kind is ScenarioKind.OPEN
        )

    def test_fallback_pipeline_agrees_with_geometry_on_all_scenes(self):
        for scenario in bundled_suite():
            outcome = run_decision_scenario(scenario)
            assert outcome.decision.source is DecisionSource.FALLBACK
            assert outcome.correct, (
                f"{scenario.name}: expected {scenario.expected.value}, "
                f"pipeline said {outcome.decision.command.value}"
            )

    def test_scenario_serialization_round_trip(self):
        scenario = build_scenario(ScenarioKind.DYNAMIC, 1)
        again = DecisionScenario.from_dict(scenario.to_dict())
        assert again.to_dict() == scenario.to_dict()

    def test_rejects_bad_suite_arguments(self):
        with pytest.raises(InputError):
            build_scenario(ScenarioKind.OPEN, -1)
        with pytest.raises(InputError):
            build_scenario_suite(per_kind=0)


class TestTranscriptReplay:
    TRANSCRIPT = resources.files("hapticnav.data").joinpath(
        "transcripts/decision_suite_medium.json"
    )

    def run_suite(self) -> list[str]:
        client = load_transcript(str(self.TRANSCRIPT))
        commands = []
        for scenario in bundled_suite():
            outcome = run_decision_scenario(scenario, client=client)
            assert outcome.decision.source is DecisionSource.LLM
            assert outcome.correct
            commands.append(outcome.decision.command.value)
        return commands

    def test_replay_is_deterministic_and_correct(self):
        assert self.run_suite() == self.run_suite()

    def test_transcript_digests_pin_the_prompts(self):
        entries = record_transcript(bundled_suite())
        client = load_transcript(str(self.TRANSCRIPT))
        assert [e["prompt_sha256"] for e in entries] == [
            e["prompt_sha256"] for e in client._entries
        ]


class TestSceneSummaryHelper:
    def test_summary_flags_the_hazard(self):
        summary = scene_summary(obstacle_ahead(0.7))
        assert [o.immediate_hazard for o in summary.objects] == [True]
        assert summary.window_span == (1, 5)

    def test_pose_is_respected(self):
        # Looking away from the obstacle: nothing consolidates.
        pose = Pose(OBSERVER_POSE.x_m, OBSERVER_POSE.y_m, 180.0)
        summary = scene_summary(obstacle_ahead(0.7), pose=pose)
        assert summary.objects == ()

    def test_high_sensitivity_decision_still_uses_same_summary(self):
        outcome = run_decision_scenario(
            build_scenario(ScenarioKind.STATIC, 0),
            config=PolicyConfig(sensitivity=Sensitivity.HIGH),
        )
        assert outcome.correct
