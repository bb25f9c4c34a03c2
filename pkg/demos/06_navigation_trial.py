"""A full navigation trial: waypoints, cues, obstacle avoidance.

The simulated wearer starts at the first waypoint of a bundled path and
walks on haptic cues alone. With perfect perception every cue lands;
with the bundled recognition profile some cues are misread and the
guidance loop corrects on the next tick. A static cart dropped onto the
path shows the hazard stop taking over.

    python3 demos/06_navigation_trial.py
"""
from __future__ import annotations

import pathlib
from collections import Counter

from hapticnav.navigator import bundled_path
from hapticnav.sim.confusion import bundled_profile
from hapticnav.sim.environment import Environment, StaticObstacle
from hapticnav.sim.trial import TrialConfig, run_navigation_trial

path = bundled_path("path1")


def describe(tag: str, result) -> None:
    m = result.metrics
    status = "completed" if result.completed else "timed out"
    misread = sum(1 for p in result.playbacks if p.perceived != p.actual)
    print(
        f"{tag:<22} {status:<9} t={m.completion_time_s:>5.1f} s  "
        f"waypoints={m.waypoints_reached}/{len(path.waypoints)}  "
        f"outside={m.pct_time_outside_tolerance:.2f}%  misread cues={misread}"
    )


print(f"path1: {len(path.waypoints)} waypoints\n")
perfect = run_navigation_trial(path, seed=0)
describe("perfect perception", perfect)

confused = run_navigation_trial(path, profile=bundled_profile(), seed=0)
describe("confused perception", confused)

blocked = run_navigation_trial(
    path,
    environment=Environment(static_obstacles=(StaticObstacle("cart", 3.35, 1.35, 0.3, 0.8),)),
    config=TrialConfig(timeout_s=30.0),
    seed=0,
)
describe("cart on the path", blocked)

print("\ncue mix in the confused run (played -> felt):")
pairs = Counter((p.actual.value, p.perceived.value) for p in confused.playbacks)
for (played, felt), count in sorted(pairs.items()):
    marker = "" if played == felt else "   <- misread"
    print(f"  {played:<18} felt as {felt:<18} x{count}{marker}")

# Trajectory plot: corridor, waypoints, both walks.
out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from shapely.geometry import LineString

band = LineString(path.waypoints).buffer(0.3)
bx, by = band.exterior.xy
fig, ax = plt.subplots(figsize=(6.0, 6.0))
ax.fill(bx, by, color="#e4efe4", lw=0, label="±0.3 m corridor")
ax.plot([w[0] for w in path.waypoints], [w[1] for w in path.waypoints], "--o", color="#5a8f5a", ms=5, label="waypoints")
for result, color, label in ((perfect, "#3366aa", "perfect"), (confused, "#aa6633", "confused")):
    ax.plot(
        [p.x_m for _, p in result.trajectory],
        [p.y_m for _, p in result.trajectory],
        color=color,
        lw=1.2,
        label=label,
    )
ax.set_xlabel("x (m)")
ax.set_ylabel("y (m)")
ax.set_aspect("equal")
ax.legend()
fig.tight_layout()
target_file = out_dir / "navigation_trial.svg"
fig.savefig(target_file, metadata={"Date": None})
print(f"\ntrajectories written to {target_file}")
