"""2D operating area, grid-aligned gateway movement, and scripted waypoint mobility."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum


class Action(IntEnum):
    """One grid move per decision interval; SAME keeps the current cell."""

    LEFT = 0
    RIGHT = 1
    UP = 2
    DOWN = 3
    SAME = 4


# displacement in grid steps per action, (dx, dy)
_ACTION_DELTAS = {
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
    Action.UP: (0, 1),
    Action.DOWN: (0, -1),
    Action.SAME: (0, 0),
}


@dataclass(frozen=True)
class Position:
    x: float
    y: float


@dataclass(frozen=True)
class Venue:
    """Rectangular area with a square decision grid of spacing `step` meters."""

    width: float = 1000.0
    height: float = 1000.0
    step: float = 25.0
    decision_interval: float = 1.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.step <= 0:
            raise ValueError("venue width, height and step must be positive")
        if self.decision_interval <= 0:
            raise ValueError("decision_interval must be positive")
        for name, extent in (("width", self.width), ("height", self.height)):
            ratio = extent / self.step
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"step must divide {name} evenly")

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def grid_shape(self) -> tuple[int, int]:
        """Number of reachable grid columns and rows, bounds included."""
        return int(round(self.width / self.step)) + 1, int(round(self.height / self.step)) + 1

    def contains(self, p: Position) -> bool:
        return 0.0 <= p.x <= self.width and 0.0 <= p.y <= self.height

    def is_grid_aligned(self, p: Position, tol: float = 1e-9) -> bool:
        return (
            abs(p.x / self.step - round(p.x / self.step)) <= tol
            and abs(p.y / self.step - round(p.y / self.step)) <= tol
        )

    def snap(self, p: Position) -> Position:
        """Nearest grid point, clamped to the venue bounds."""
        x = min(max(round(p.x / self.step) * self.step, 0.0), self.width)
        y = min(max(round(p.y / self.step) * self.step, 0.0), self.height)
        return Position(x, y)


def clamp_move(p: Position, action: Action, venue: Venue) -> Position:
    """Displace `p` one grid step in the action direction, clamped to the venue.

    Out-of-bounds moves are absorbed by the clamp, never an error.
    """
    dx, dy = _ACTION_DELTAS[Action(action)]
    x = min(max(p.x + dx * venue.step, 0.0), venue.width)
    y = min(max(p.y + dy * venue.step, 0.0), venue.height)
    return Position(x, y)


def distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True)
class WaypointSchedule:
    """Piecewise-linear mobility: hold before the first and after the last waypoint,
    constant-speed straight lines in between."""

    waypoints: tuple[tuple[float, Position], ...]

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("waypoint schedule must contain at least one waypoint")
        times = [t for t, _ in self.waypoints]
        for earlier, later in zip(times, times[1:]):
            if later <= earlier:
                raise ValueError("waypoint times must be strictly increasing")

    @classmethod
    def stationary(cls, p: Position) -> "WaypointSchedule":
        return cls(((0.0, p),))

    @property
    def end_time(self) -> float:
        return self.waypoints[-1][0]

    def is_stationary_at(self, t: float) -> bool:
        """True when the scheduled node is not moving at time t."""
        segments = self.stationary_segments(t + 1.0)
        return any(lo <= t <= hi for lo, hi, _ in segments)

    def stationary_segments(self, horizon: float) -> list[tuple[float, float, Position]]:
        """Maximal (t_start, t_end, position) spans with no motion, up to `horizon`.

        Includes the hold before the first waypoint, any segment whose endpoints
        coincide, and the hold after the final waypoint.
        """
        spans: list[tuple[float, float, Position]] = []
        first_t, first_p = self.waypoints[0]
        if first_t > 0:
            spans.append((0.0, first_t, first_p))
        for (t0, p0), (t1, p1) in zip(self.waypoints, self.waypoints[1:]):
            if p0 == p1:
                spans.append((t0, t1, p0))
        last_t, last_p = self.waypoints[-1]
        if horizon > last_t:
            spans.append((last_t, horizon, last_p))
        # merge adjacent spans at the same position
        merged: list[tuple[float, float, Position]] = []
        for span in spans:
            if merged and merged[-1][2] == span[2] and abs(merged[-1][1] - span[0]) < 1e-9:
                merged[-1] = (merged[-1][0], span[1], span[2])
            else:
                merged.append(span)
        return merged


def position_at(schedule: WaypointSchedule, t: float) -> Position:
    """Scheduled position at time t >= 0."""
    if t < 0:
        raise ValueError("time must be non-negative")
    wps = schedule.waypoints
    if t <= wps[0][0]:
        return wps[0][1]
    for (t0, p0), (t1, p1) in zip(wps, wps[1:]):
        if t <= t1:
            frac = (t - t0) / (t1 - t0)
            return Position(p0.x + frac * (p1.x - p0.x), p0.y + frac * (p1.y - p0.y))
    return wps[-1][1]
