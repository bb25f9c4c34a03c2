"""Command policy: the deterministic fallback and sensitivity filtering.

Every scene summary becomes one of four commands. Without a language
model client the rule-based fallback decides; it prefers Forward, turns
toward the cheaper side when something blocks the way, and calls Stop
when both sides are crowded too.

    python3 demos/03_command_policy.py
"""
from __future__ import annotations

from hapticnav.perception import BBox, Column, GridCell, Row, SpatialObject
from hapticnav.policy import PolicyConfig, Sensitivity, build_prompt, decide, filter_objects
from hapticnav.scene import SceneWindow, summarize

BOX = BBox(0.45, 0.55, 0.55, 0.9)
CELL = {
    "ahead": GridCell(Row.BOTTOM, Column.CENTER),
    "left": GridCell(Row.BOTTOM, Column.LEFT),
    "right": GridCell(Row.BOTTOM, Column.RIGHT),
    "high": GridCell(Row.TOP, Column.CENTER),
}


def scene(*objects: tuple[str, str, float]):
    """Three identical frames so everything passes the persistence gate."""
    window = SceneWindow(capacity=5)
    for frame_id in (1, 2, 3):
        window.push(
            frame_id,
            [
                SpatialObject(label, CELL[place], distance, 0.0, 0.9, BOX)
                for label, place, distance in objects
            ],
        )
    return summarize(window, persistence_k=3)


config = PolicyConfig()
situations = [
    ("clear corridor", scene(("sign", "high", 2.5))),
    ("bin ahead, right side open", scene(("bin", "ahead", 0.8), ("chair", "left", 1.2))),
    ("bin ahead, left side open", scene(("bin", "ahead", 0.8), ("cart", "right", 1.1))),
    ("hemmed in on all sides", scene(("bin", "ahead", 0.7), ("box", "left", 0.45), ("cart", "right", 0.45))),
]

for name, summary in situations:
    decision = decide(summary, config)
    hazards = ", ".join(o.label for o in summary.hazards()) or "none"
    print(f"{name:<28} hazards: {hazards:<10} -> {decision.command.value}")

# Sensitivity controls how much of the scene reaches the prompt (and the
# wearer): high keeps everything, medium the walking surface, low only
# flagged hazards.
busy = scene(("bin", "ahead", 0.8), ("chair", "left", 1.4), ("sign", "high", 2.0))
print("\nsame scene through the three sensitivity levels:")
for sensitivity in Sensitivity:
    kept = [o.label for o in filter_objects(busy, sensitivity)]
    print(f"  {sensitivity.value:<7} -> {kept}")

print("\nthe prompt a language model would receive at medium sensitivity:")
for line in build_prompt(busy, Sensitivity.MEDIUM).scene_text.splitlines():
    print(f"  | {line}")
