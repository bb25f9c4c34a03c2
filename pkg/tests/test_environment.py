"""Room model and obstacle motion."""
from __future__ import annotations

import math

import pytest

from hapticnav.errors import InputError
from hapticnav.sim.environment import DynamicObstacle, Environment, StaticObstacle


def test_static_obstacles_placed_as_given():
    env = Environment(static_obstacles=(StaticObstacle("bin", 2.0, 3.0, 0.3, 0.8),))
    placed = env.obstacles_at(12.0)
    assert len(placed) == 1
    assert (placed[0].x_m, placed[0].y_m) == (2.0, 3.0)
    assert placed[0].height_m == 0.8


def test_dynamic_obstacle_walks_its_loop():
    walker = DynamicObstacle(
        "person", 0.25, 1.7, route=((1.0, 1.0), (3.0, 1.0)), speed_mps=1.0
    )
    # Loop is 2 m out + 2 m back = 4 m.
    assert walker.position_at(0.0) == (1.0, 1.0)
    assert walker.position_at(1.0) == (2.0, 1.0)
    assert walker.position_at(2.0) == (3.0, 1.0)
    x, y = walker.position_at(3.0)
    assert (x, y) == pytest.approx((2.0, 1.0))
    # Wraps around.
    assert walker.position_at(4.0) == pytest.approx(walker.position_at(0.0))
    assert walker.position_at(9.0) == pytest.approx(walker.position_at(1.0))


def test_dynamic_position_is_pure_function_of_time():
    walker = DynamicObstacle(
        "person", 0.25, 1.7, route=((0.5, 0.5), (2.5, 0.5), (2.5, 2.5)), speed_mps=0.7
    )
    for t in (0.0, 1.3, 2.6, 7.77):
        assert walker.position_at(t) == walker.position_at(t)


def test_environment_rejects_out_of_room_obstacles():
    with pytest.raises(InputError):
        Environment(static_obstacles=(StaticObstacle("bin", 7.0, 1.0, 0.3, 0.8),))
    with pytest.raises(InputError):
        Environment(
            dynamic_obstacles=(
                DynamicObstacle("p", 0.2, 1.7, route=((1.0, 1.0), (1.0, 6.5)), speed_mps=1.0),
            )
        )


def test_obstacle_validation():
    with pytest.raises(InputError):
        StaticObstacle("bin", 1.0, 1.0, 0.0, 0.8)
    with pytest.raises(InputError):
        DynamicObstacle("p", 0.2, 1.7, route=((1.0, 1.0),), speed_mps=1.0)
    with pytest.raises(InputError):
        DynamicObstacle("p", 0.2, 1.7, route=((1.0, 1.0), (2.0, 1.0)), speed_mps=0.0)


def test_environment_json_round_trip(tmp_path):
    env = Environment(
        room_width_m=6.0,
        room_depth_m=6.0,
        static_obstacles=(StaticObstacle("bin", 2.0, 3.0, 0.3, 0.8),),
        dynamic_obstacles=(
            DynamicObstacle("person", 0.25, 1.7, route=((1.0, 1.0), (3.0, 1.0)), speed_mps=1.0),
        ),
    )
    file = tmp_path / "room.json"
    env.to_json(file)
    assert Environment.from_json(file) == env


def test_empty_environment():
    env = Environment()
    assert env.is_empty
    assert env.obstacles_at(0.0) == []
