"""The bundled decision suite: 60 labeled scenes through the full stack.

Each scenario places obstacles in a room, renders five synthetic camera
frames from a fixed observer, runs detection mapping, windowing and the
command policy, and compares the command against the label a geometric
analysis assigned when the suite was generated.

    python3 demos/07_decision_scenarios.py
"""
from __future__ import annotations

from collections import Counter

from hapticnav.sim.scenarios import (
    OBSERVER_POSE,
    bundled_suite,
    run_decision_scenario,
    scene_summary,
)

suite = bundled_suite()
kinds = Counter(s.kind.value for s in suite)
print(f"{len(suite)} scenarios: " + ", ".join(f"{k} x{n}" for k, n in sorted(kinds.items())))

outcomes = [run_decision_scenario(s) for s in suite]
n_correct = sum(1 for o in outcomes if o.correct)
by_command = Counter(o.expected.value for o in outcomes)
print(f"fallback policy: {n_correct}/{len(outcomes)} correct")
print("expected commands: " + ", ".join(f"{c} x{n}" for c, n in sorted(by_command.items())))

# Walk through one scenario of each kind in detail.
print()
for kind in ("open", "static", "dynamic"):
    scenario = next(s for s in suite if s.kind.value == kind)
    print(f"--- {scenario.name} (expect {scenario.expected.value}) ---")
    for obstacle in scenario.environment.static_obstacles:
        print(
            f"  static  {obstacle.label:<7} at ({obstacle.x_m:.2f}, {obstacle.y_m:.2f}) "
            f"r={obstacle.radius_m:.2f} h={obstacle.height_m:.2f}"
        )
    for obstacle in scenario.environment.dynamic_obstacles:
        x, y = obstacle.position_at(0.0)
        print(
            f"  dynamic {obstacle.label:<7} at ({x:.2f}, {y:.2f}) "
            f"moving {obstacle.speed_mps:.2f} m/s"
        )
    summary = scene_summary(scenario.environment, OBSERVER_POSE)
    for obj in summary.objects:
        flag = " [hazard]" if obj.immediate_hazard else ""
        print(f"  seen as {obj.label:<7} {obj.cell.label():<13} {obj.distance_m:.2f} m{flag}")
    decision = run_decision_scenario(scenario)
    print(f"  -> {decision.decision.command.value}\n")
