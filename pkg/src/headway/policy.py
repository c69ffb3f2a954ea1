"""Speed decisions under a free-distance budget.

Contains the safety predicate (can we still stop within the free distance),
the largest speed reachable by an accelerate-then-brake maneuver that fits
in the budget, the decision function over a speed ladder assuming continuous
observation, and reference travel-time computations used to compare driving
policies against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kinematics import (
    KinematicProfile,
    SpeedLadder,
    accel_distance,
    accel_time,
    brake_distance,
    brake_time,
)

ACCELERATE = "accelerate"
BRAKE = "brake"
HOLD = "hold"

POLICY_ACCEL_BRAKE = "ab"
POLICY_CONSTANT_BRAKE = "cb"
POLICY_BRAKE_ACCEL = "ba"


class UnsafeStateError(ValueError):
    """The queried speed cannot stop within the given free distance."""


class InfeasiblePolicyError(ValueError):
    """The requested policy cannot traverse the given distance."""


def is_safe(profile: KinematicProfile, speed: float, free_distance: float) -> bool:
    """True iff a full stop from ``speed`` fits within ``free_distance``."""
    if free_distance < 0:
        raise ValueError(f"free distance must be nonnegative, got {free_distance}")
    return brake_distance(profile, speed, 0.0) <= free_distance


def max_target_speed(profile: KinematicProfile, speed: float, free_distance: float) -> float:
    """Largest speed reachable by accelerating then braking to a stop within
    ``free_distance``, capped at the profile's limit speed.

    For constant rates the uncapped solution of
    ``accel_distance(V, v) + brake_distance(v, 0) = F`` is
    ``sqrt((2*a*b*F + b*V^2) / (a + b))``. The result is >= ``speed``, and the
    accelerate+brake distance equals ``free_distance`` exactly whenever the
    cap does not bind.

    Raises:
        UnsafeStateError: if ``free_distance`` is below the stopping distance.
    """
    if not is_safe(profile, speed, free_distance):
        raise UnsafeStateError(
            f"speed {speed} m/s cannot stop within {free_distance} m "
            f"(needs {brake_distance(profile, speed, 0.0)} m)"
        )
    a = profile.accel_rate
    b = profile.brake_rate
    unbounded = math.sqrt((2.0 * a * b * free_distance + b * speed * speed) / (a + b))
    return min(unbounded, profile.limit_speed)


@dataclass(frozen=True)
class ControlDecision:
    """Outcome of one ladder decision: what to do and which level to aim at."""

    action: str
    target_level: int


def ideal_control(ladder: SpeedLadder, level: int, free_distance: float) -> ControlDecision:
    """Ladder decision assuming the free distance is continuously observed.

    Brake one level when the free distance has shrunk to the stopping
    distance of the current level; climb one level when it covers the
    climb-and-stop distance of the next; otherwise hold. The brake guard is
    checked first so the function stays total on degenerate ladders.
    """
    if not 0 <= level <= ladder.top:
        raise ValueError(f"level {level} out of range 0..{ladder.top}")
    if level >= 1 and free_distance <= ladder.brake_distances[level]:
        return ControlDecision(BRAKE, level - 1)
    if level < ladder.top and free_distance >= ladder.climb_distances[level + 1]:
        return ControlDecision(ACCELERATE, level + 1)
    return ControlDecision(HOLD, level)


def _leg_times(profile: KinematicProfile, start_speed: float, budget: float) -> float:
    """Time for an accelerate/cruise/brake-to-stop leg consuming ``budget`` m.

    Accelerates to the best reachable speed; if the limit speed caps it, the
    leftover distance is covered at constant limit speed before braking.
    """
    peak = max_target_speed(profile, start_speed, budget)
    used = accel_distance(profile, start_speed, peak) + brake_distance(profile, peak, 0.0)
    leftover = budget - used
    total = accel_time(profile, start_speed, peak) + brake_time(profile, peak, 0.0)
    if leftover > 0.0:
        if peak <= 0.0:
            raise InfeasiblePolicyError("cannot cover a positive distance from standstill")
        total += leftover / peak
    return total


def policy_travel_time(
    profile: KinematicProfile,
    policy: str,
    speed: float,
    free_distance: float,
    low_speed: float | None = None,
) -> float:
    """Total time to traverse exactly ``free_distance`` and end at a stop.

    Policies:
        ``"ab"``: accelerate to the best reachable speed, then brake (cruising
            at the limit speed first if the distance exceeds what the capped
            maneuver uses).
        ``"cb"``: keep the current speed, then brake to a stop.
        ``"ba"``: brake to ``low_speed`` first, then accelerate to the best
            speed that still allows a stop in the remainder, then brake.

    Requires the initial state to be safe. ``low_speed`` is only used by
    ``"ba"`` and must satisfy 0 <= low_speed < speed.
    """
    if not is_safe(profile, speed, free_distance):
        raise UnsafeStateError(
            f"speed {speed} m/s cannot stop within {free_distance} m"
        )
    if policy == POLICY_ACCEL_BRAKE:
        return _leg_times(profile, speed, free_distance)
    if policy == POLICY_CONSTANT_BRAKE:
        stopping = brake_distance(profile, speed, 0.0)
        cruise = free_distance - stopping
        if cruise > 0.0 and speed <= 0.0:
            raise InfeasiblePolicyError("constant-speed leg at standstill cannot advance")
        total = brake_time(profile, speed, 0.0)
        if cruise > 0.0:
            total += cruise / speed
        return total
    if policy == POLICY_BRAKE_ACCEL:
        if low_speed is None:
            raise InfeasiblePolicyError("brake-first policy needs an intermediate low_speed")
        if not 0.0 <= low_speed < speed:
            raise InfeasiblePolicyError(
                f"low_speed must satisfy 0 <= low_speed < {speed}, got {low_speed}"
            )
        first_leg = brake_distance(profile, speed, low_speed)
        remainder = free_distance - first_leg
        if remainder < brake_distance(profile, low_speed, 0.0):
            raise InfeasiblePolicyError(
                "remaining distance after the brake-first leg does not allow a stop"
            )
        return brake_time(profile, speed, low_speed) + _leg_times(profile, low_speed, remainder)
    raise ValueError(f"unknown policy {policy!r}")


def ladder_traversal_time(ladder: SpeedLadder, free_distance: float) -> float:
    """Time for the continuously observed ladder policy to consume
    ``free_distance`` against a stationary obstacle, starting from rest.

    Climbs while the remaining distance covers the next climb-and-stop bound,
    cruises until the stopping distance of the reached level, then brakes
    down to a stop exactly at the obstacle. Used to compare ladders of
    different granularity: finer ladders traverse no slower.
    """
    profile = ladder.profile
    if free_distance < ladder.climb_distances[1]:
        raise InfeasiblePolicyError(
            f"distance {free_distance} m is below the first climb bound "
            f"{ladder.climb_distances[1]} m; the vehicle never leaves rest"
        )
    remaining = free_distance
    level = 0
    total = 0.0
    while level < ladder.top and remaining >= ladder.climb_distances[level + 1]:
        remaining -= ladder.accel_distances[level + 1]
        total += accel_time(profile, ladder.levels[level], ladder.levels[level + 1])
        level += 1
    cruise = remaining - ladder.brake_distances[level]
    if cruise > 0.0:
        total += cruise / ladder.levels[level]
    total += brake_time(profile, ladder.levels[level], 0.0)
    return total
