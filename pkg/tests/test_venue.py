import math

import pytest
from hypothesis import given, strategies as st

from fgwpos.venue import (
    Action,
    Position,
    Venue,
    WaypointSchedule,
    clamp_move,
    distance,
    position_at,
)

VENUE = Venue(1000, 1000, 25, 1.0)


class TestClampMove:
    def test_left_step(self):
        assert clamp_move(Position(500, 500), Action.LEFT, VENUE) == Position(475, 500)

    def test_boundary_clamp(self):
        assert clamp_move(Position(0, 500), Action.LEFT, VENUE) == Position(0, 500)

    def test_same_is_identity(self):
        assert clamp_move(Position(500, 500), Action.SAME, VENUE) == Position(500, 500)

    def test_all_directions(self):
        p = Position(500, 500)
        assert clamp_move(p, Action.RIGHT, VENUE) == Position(525, 500)
        assert clamp_move(p, Action.UP, VENUE) == Position(500, 525)
        assert clamp_move(p, Action.DOWN, VENUE) == Position(500, 475)

    @given(
        ix=st.integers(min_value=1, max_value=39),
        iy=st.integers(min_value=0, max_value=40),
    )
    def test_left_then_right_inverts_inside(self, ix, iy):
        p = Position(ix * 25.0, iy * 25.0)
        there = clamp_move(p, Action.LEFT, VENUE)
        back = clamp_move(there, Action.RIGHT, VENUE)
        assert back == p

    @given(
        ix=st.integers(min_value=0, max_value=40),
        iy=st.integers(min_value=0, max_value=40),
        actions=st.lists(st.sampled_from(list(Action)), max_size=30),
    )
    def test_grid_closure(self, ix, iy, actions):
        p = Position(ix * 25.0, iy * 25.0)
        for a in actions:
            p = clamp_move(p, a, VENUE)
        assert VENUE.contains(p)
        assert VENUE.is_grid_aligned(p)


class TestVenue:
    def test_grid_shape(self):
        assert VENUE.grid_shape() == (41, 41)

    def test_step_must_divide(self):
        with pytest.raises(ValueError):
            Venue(1000, 1000, 30)

    def test_snap(self):
        assert VENUE.snap(Position(666.67, 500)) == Position(675, 500)
        assert VENUE.snap(Position(-10, 1200)) == Position(0, 1000)


class TestDistance:
    def test_diagonal(self):
        assert distance(Position(0, 0), Position(1000, 1000)) == pytest.approx(
            1414.214, abs=1e-3
        )

    def test_reported_final_position(self):
        assert distance(Position(175, 525), Position(0, 0)) == pytest.approx(553.40, abs=0.01)

    def test_identity(self):
        assert distance(Position(37, 81), Position(37, 81)) == 0.0


PAPER_LIKE = WaypointSchedule(
    (
        (0.0, Position(600, 600)),
        (20.0, Position(600, 600)),
        (40.0, Position(1000, 1000)),
    )
)


class TestPositionAt:
    def test_holds_first_waypoint(self):
        assert position_at(PAPER_LIKE, 10.0) == Position(600, 600)

    def test_linear_midpoint(self):
        assert position_at(PAPER_LIKE, 30.0) == Position(800, 800)

    def test_holds_after_final(self):
        assert position_at(PAPER_LIKE, 100.0) == Position(1000, 1000)

    def test_empty_schedule_rejected(self):
        with pytest.raises(ValueError):
            WaypointSchedule(())

    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            WaypointSchedule(((0.0, Position(0, 0)), (0.0, Position(1, 1))))

    @given(
        t=st.floats(min_value=20.0, max_value=39.0),
        eps=st.floats(min_value=1e-6, max_value=1.0),
    )
    def test_continuity_within_segment(self, t, eps):
        if t + eps > 40.0:
            eps = 40.0 - t
        speed = math.hypot(400, 400) / 20.0
        a = position_at(PAPER_LIKE, t)
        b = position_at(PAPER_LIKE, t + eps)
        assert distance(a, b) <= speed * eps + 1e-9

    def test_stationary_segments(self):
        spans = PAPER_LIKE.stationary_segments(horizon=70.0)
        assert spans == [
            (0.0, 20.0, Position(600, 600)),
            (40.0, 70.0, Position(1000, 1000)),
        ]
