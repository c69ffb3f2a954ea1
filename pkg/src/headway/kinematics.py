"""Constant-rate kinematics: distance/time to accelerate or brake, and the
precomputed speed-level table the controllers switch over.

All quantities are SI (m, m/s, m/s^2, s). The closed forms below are exact
for motion at constant rates, and they satisfy two algebraic properties the
rest of the library leans on: additivity (splitting a speed change at an
intermediate speed does not change the total distance) and strict
monotonicity in the target speed. Both are enforced by the test suite.

The distance/time functions take the profile explicitly so that a different
vehicle model (e.g. variable-rate) can be substituted behind the same
signatures without touching callers.
"""

from __future__ import annotations

from dataclasses import dataclass


class DomainError(ValueError):
    """A speed argument fell outside the function's domain."""


class LadderError(ValueError):
    """Speed levels do not form a valid ladder."""


@dataclass(frozen=True)
class KinematicProfile:
    """Constant accelerating/braking rates and the vehicle's limit speed.

    Attributes:
        accel_rate: acceleration when speeding up, m/s^2, > 0.
        brake_rate: deceleration when braking, m/s^2, > 0 (magnitude).
        limit_speed: maximum admissible speed, m/s, > 0.
    """

    accel_rate: float
    brake_rate: float
    limit_speed: float

    def __post_init__(self) -> None:
        if not (self.accel_rate > 0 and self.brake_rate > 0 and self.limit_speed > 0):
            raise DomainError(
                "accel_rate, brake_rate and limit_speed must all be positive, got "
                f"a={self.accel_rate}, b={self.brake_rate}, v_limit={self.limit_speed}"
            )


def _check_brake_args(profile: KinematicProfile, from_speed: float, to_speed: float) -> None:
    if to_speed < 0:
        raise DomainError(f"target speed must be nonnegative, got {to_speed}")
    if to_speed > from_speed:
        raise DomainError(
            f"braking target {to_speed} m/s exceeds initial speed {from_speed} m/s"
        )
    if from_speed > profile.limit_speed:
        raise DomainError(
            f"initial speed {from_speed} m/s exceeds limit {profile.limit_speed} m/s"
        )


def _check_accel_args(profile: KinematicProfile, from_speed: float, to_speed: float) -> None:
    if from_speed < 0:
        raise DomainError(f"initial speed must be nonnegative, got {from_speed}")
    if to_speed < from_speed:
        raise DomainError(
            f"acceleration target {to_speed} m/s is below initial speed {from_speed} m/s"
        )
    if to_speed > profile.limit_speed:
        raise DomainError(
            f"target speed {to_speed} m/s exceeds limit {profile.limit_speed} m/s"
        )


def brake_distance(profile: KinematicProfile, from_speed: float, to_speed: float) -> float:
    """Distance travelled while braking from ``from_speed`` down to ``to_speed``.

    Requires 0 <= to_speed <= from_speed <= limit. Zero iff the speeds are equal.
    """
    _check_brake_args(profile, from_speed, to_speed)
    drop = from_speed - to_speed
    return from_speed * drop / profile.brake_rate - 0.5 * drop * drop / profile.brake_rate


def accel_distance(profile: KinematicProfile, from_speed: float, to_speed: float) -> float:
    """Distance travelled while accelerating from ``from_speed`` up to ``to_speed``.

    Requires 0 <= from_speed <= to_speed <= limit. Zero iff the speeds are equal.
    """
    _check_accel_args(profile, from_speed, to_speed)
    gain = to_speed - from_speed
    return from_speed * gain / profile.accel_rate + 0.5 * gain * gain / profile.accel_rate


def brake_time(profile: KinematicProfile, from_speed: float, to_speed: float) -> float:
    """Time to brake from ``from_speed`` to ``to_speed`` at the constant rate."""
    _check_brake_args(profile, from_speed, to_speed)
    return (from_speed - to_speed) / profile.brake_rate


def accel_time(profile: KinematicProfile, from_speed: float, to_speed: float) -> float:
    """Time to accelerate from ``from_speed`` to ``to_speed`` at the constant rate."""
    _check_accel_args(profile, from_speed, to_speed)
    return (to_speed - from_speed) / profile.accel_rate


@dataclass(frozen=True)
class SpeedLadder:
    """Increasing speed levels with precomputed per-level safety distances.

    ``levels[0]`` is always the standstill level 0 m/s. For each level
    index ``i >= 1``:

    * ``brake_distances[i]``: distance to brake from ``levels[i]`` to a stop.
    * ``accel_distances[i]``: distance to accelerate ``levels[i-1] -> levels[i]``.
    * ``climb_distances[i]``: ``accel_distances[i] + brake_distances[i]``, the
      minimal free distance that admits climbing one level and still being
      able to stop.

    Index 0 of each distance table is zero by convention.
    """

    profile: KinematicProfile
    levels: tuple[float, ...]
    brake_distances: tuple[float, ...]
    accel_distances: tuple[float, ...]
    climb_distances: tuple[float, ...]

    @property
    def top(self) -> int:
        """Index of the highest level."""
        return len(self.levels) - 1

    @property
    def top_speed(self) -> float:
        return self.levels[-1]


def build_speed_ladder(profile: KinematicProfile, levels) -> SpeedLadder:
    """Build a :class:`SpeedLadder` from strictly increasing speed levels.

    A leading 0 m/s level is prepended when absent. Rejects empty input,
    non-increasing sequences and levels above the profile's limit speed.
    """
    levels = [float(v) for v in levels]
    if not levels:
        raise LadderError("at least one speed level is required")
    if levels[0] != 0.0:
        levels = [0.0] + levels
    for lower, upper in zip(levels, levels[1:]):
        if upper <= lower:
            raise LadderError(f"levels must be strictly increasing, got {upper} after {lower}")
    if levels[1] <= 0.0:
        raise LadderError("speed levels must be positive")
    if levels[-1] > profile.limit_speed:
        raise LadderError(
            f"top level {levels[-1]} m/s exceeds limit speed {profile.limit_speed} m/s"
        )

    brake = [0.0]
    accel = [0.0]
    climb = [0.0]
    for i in range(1, len(levels)):
        brake.append(brake_distance(profile, levels[i], 0.0))
        accel.append(accel_distance(profile, levels[i - 1], levels[i]))
        climb.append(accel[i] + brake[i])
    return SpeedLadder(
        profile=profile,
        levels=tuple(levels),
        brake_distances=tuple(brake),
        accel_distances=tuple(accel),
        climb_distances=tuple(climb),
    )
