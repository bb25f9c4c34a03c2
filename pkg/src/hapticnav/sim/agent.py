"""How the simulated wearer moves in response to what they feel.

One cue, one motion: a front slide means walk, a lateral slide means
rotate in place toward that side, everything else (taps, back slides,
silence) means stand still. Speeds follow typical cautious indoor
walking.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

from ..errors import InputError
from ..haptics.patterns import HapticPatternId
from ..navigator import Pose


@dataclass(frozen=True)
class AgentModel:
    walk_speed_mps: float = 0.8
    turn_rate_dps: float = 45.0

    def __post_init__(self) -> None:
        if self.walk_speed_mps <= 0 or self.turn_rate_dps <= 0:
            raise InputError("agent speeds must be positive")


_WALK = {HapticPatternId.SLIDE_FRONT_FAST, HapticPatternId.SLIDE_FRONT_SLOW}
_TURN_LEFT = {HapticPatternId.SLIDE_LEFT_FAST, HapticPatternId.SLIDE_LEFT_SLOW}
_TURN_RIGHT = {HapticPatternId.SLIDE_RIGHT_FAST, HapticPatternId.SLIDE_RIGHT_SLOW}


def step_agent(
    pose: Pose,
    perceived: HapticPatternId | None,
    agent: AgentModel,
    dt_s: float,
) -> Pose:
    """Advance the wearer one tick under the cue they currently feel."""
    if dt_s <= 0:
        raise InputError(f"dt must be positive: {dt_s}")
    if perceived in _WALK:
        heading = math.radians(pose.heading_deg)
        return Pose(
            pose.x_m + agent.walk_speed_mps * dt_s * math.cos(heading),
            pose.y_m + agent.walk_speed_mps * dt_s * math.sin(heading),
            pose.heading_deg,
        )
    if perceived in _TURN_LEFT:
        return Pose(pose.x_m, pose.y_m, pose.heading_deg + agent.turn_rate_dps * dt_s)
    if perceived in _TURN_RIGHT:
        return Pose(pose.x_m, pose.y_m, pose.heading_deg - agent.turn_rate_dps * dt_s)
    return pose
