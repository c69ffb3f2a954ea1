"""Event-driven speed controllers over a ladder of levels.

Two executable refinements of the continuous-observation decision function:

* :class:`SyncController` receives the measured free distance periodically
  (period ``T``) and compensates the staleness of the measurement by
  inflating every guard bound by ``top_speed * T``.
* :class:`AsyncController` receives measurements sporadically and dead
  reckons a local estimate between them, decrementing it on an internal
  clock tick (period ``dt``); guard bounds are inflated by the estimation
  slack ``top_speed * dt``.

Both are deterministic single-owner state machines: deliver events serially
through :meth:`step`, which returns the actuation to apply, if any. Neither
keeps wall-clock time; time enters only through events.

An :class:`IdealController` with uninflated point thresholds is provided as
a reference. It is *not* safe under sampling (it can overshoot its braking
threshold by up to one sampling interval of travel), which is precisely the
gap the inflated bounds close.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kinematics import SpeedLadder

# Controller modes.
CRUISE = "cruise"
ACCELERATING = "accelerating"
BRAKING = "braking"
EMERGENCY = "emergency"

# Actuation kinds.
ACCELERATE = "accelerate"
BRAKE = "brake"
HOLD = "hold"
EMERGENCY_BRAKE = "emergency_brake"


class ControllerConfigError(ValueError):
    """Invalid controller construction (unsafe start or bad timing bounds)."""


class ProtocolError(RuntimeError):
    """An event arrived in a mode where it is not legal."""


@dataclass(frozen=True)
class UpdateFreeDistance:
    """Sensor event carrying a fresh free-distance measurement in meters."""

    value: float

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError(f"measured free distance must be nonnegative, got {self.value}")


@dataclass(frozen=True)
class Tick:
    """Internal clock event of the asynchronous controller."""


@dataclass(frozen=True)
class AccelComplete:
    """The vehicle reports it reached the commanded higher speed."""


@dataclass(frozen=True)
class BrakeComplete:
    """The vehicle reports it reached the commanded lower speed."""


TICK = Tick()
ACCEL_COMPLETE = AccelComplete()
BRAKE_COMPLETE = BrakeComplete()


@dataclass(frozen=True)
class ActuationCommand:
    """Command to the vehicle: change toward, or hold, a target speed."""

    action: str
    target_speed: float


@dataclass(frozen=True)
class AdjustedLadder:
    """Ladder bounds inflated by a worst-case travel horizon.

    ``horizon`` is the distance the vehicle may cover between two looks at
    the free distance. Per level ``i``:

    * ``accel_bounds[i]`` = climb bound + horizon (trigger for climbing),
    * ``brake_low[i]``    = stop distance + horizon (lower edge of the
      braking band; below it the measurement came too late),
    * ``brake_high[i]``   = stop distance + 2 * horizon (upper edge).

    The band is exactly one horizon wide, so an estimate that shrinks by at
    most one horizon per look cannot jump over it.
    """

    base: SpeedLadder
    horizon: float
    accel_bounds: tuple[float, ...]
    brake_low: tuple[float, ...]
    brake_high: tuple[float, ...]


def inflate_ladder(base: SpeedLadder, horizon: float, *, require_separation: bool = True) -> AdjustedLadder:
    """Inflate ladder bounds by ``horizon`` meters.

    With ``require_separation`` the climb trigger of level ``i+1`` must stay
    strictly above the braking band of level ``i``; otherwise the guards
    overlap and the controller degenerates to brake-priority behavior.
    """
    if horizon <= 0:
        raise ControllerConfigError(f"horizon must be positive, got {horizon}")
    accel = tuple(d + horizon if i else 0.0 for i, d in enumerate(base.climb_distances))
    low = tuple(d + horizon if i else 0.0 for i, d in enumerate(base.brake_distances))
    high = tuple(d + 2.0 * horizon if i else 0.0 for i, d in enumerate(base.brake_distances))
    if require_separation:
        for i in range(base.top):
            if not accel[i + 1] > high[i]:
                raise ControllerConfigError(
                    f"horizon {horizon} m merges the climb trigger of level {i + 1} "
                    f"({accel[i + 1]} m) into the braking band of level {i} "
                    f"(up to {high[i]} m)"
                )
    return AdjustedLadder(base=base, horizon=horizon, accel_bounds=accel, brake_low=low, brake_high=high)


class _LadderController:
    """Shared mode/guard machinery of the discrete controllers."""

    __slots__ = (
        "ladder",
        "mode",
        "level",
        "target_level",
        "f_estimate",
        "updates_applied",
        "emergency_triggered",
    )

    def __init__(self, ladder: AdjustedLadder, initial_level: int, initial_free_distance: float):
        base = ladder.base
        if not 0 <= initial_level <= base.top:
            raise ControllerConfigError(
                f"initial level {initial_level} out of range 0..{base.top}"
            )
        if base.brake_distances[initial_level] > initial_free_distance:
            raise ControllerConfigError(
                f"level {initial_level} ({base.levels[initial_level]} m/s) is unsafe for an "
                f"initial free distance of {initial_free_distance} m "
                f"(needs {base.brake_distances[initial_level]} m)"
            )
        self.ladder = ladder
        self.mode = CRUISE
        self.level = initial_level
        self.target_level = initial_level
        self.f_estimate = initial_free_distance
        self.updates_applied = 0
        self.emergency_triggered = False

    # -- guard evaluation (cruise mode only) --------------------------------

    def _evaluate(self) -> ActuationCommand:
        lad = self.ladder
        base = lad.base
        i = self.level
        f = self.f_estimate
        if i >= 1:
            if f < lad.brake_low[i]:
                self.mode = EMERGENCY
                self.target_level = 0
                self.emergency_triggered = True
                return ActuationCommand(EMERGENCY_BRAKE, 0.0)
            if f <= lad.brake_high[i]:
                self.mode = BRAKING
                self.target_level = i - 1
                return ActuationCommand(BRAKE, base.levels[i - 1])
        if i < base.top and f >= lad.accel_bounds[i + 1]:
            self.mode = ACCELERATING
            self.target_level = i + 1
            return ActuationCommand(ACCELERATE, base.levels[i + 1])
        return ActuationCommand(HOLD, base.levels[i])

    # -- completion transitions ---------------------------------------------

    def _complete_accel(self) -> ActuationCommand:
        if self.mode != ACCELERATING:
            raise ProtocolError(f"acceleration-complete event in mode {self.mode_label()}")
        self.level = self.target_level
        self.mode = CRUISE
        return ActuationCommand(HOLD, self.ladder.base.levels[self.level])

    def _complete_brake(self) -> ActuationCommand:
        if self.mode not in (BRAKING, EMERGENCY):
            raise ProtocolError(f"brake-complete event in mode {self.mode_label()}")
        self.level = self.target_level
        self.mode = CRUISE
        return ActuationCommand(HOLD, self.ladder.base.levels[self.level])

    # -- introspection --------------------------------------------------------

    def mode_label(self) -> str:
        """Compact human-readable mode, e.g. ``cruise(2)`` or ``brake(2->1)``."""
        if self.mode == CRUISE:
            return f"cruise({self.level})"
        return f"{self.mode}({self.level}->{self.target_level})"


class SyncController(_LadderController):
    """Periodically sensed controller.

    Every ``period`` seconds an :class:`UpdateFreeDistance` event refreshes
    the estimate; while cruising the refreshed value is checked against the
    inflated guards. Mid-maneuver updates only refresh the estimate,
    completions return the controller to cruise at the new level.

    Construction enforces the period bound
    ``climb_distance[i] - level_speed[i] * period >= stop_distance[i]`` for
    every level, which guarantees the braking band cannot be skipped between
    two looks. Pass ``enforce_period_bound=False`` to study oversized
    periods anyway (the controller then degrades to brake-priority and loses
    efficiency, not safety).
    """

    __slots__ = ("period",)

    def __init__(
        self,
        ladder: SpeedLadder,
        period: float,
        initial_level: int,
        initial_free_distance: float,
        *,
        enforce_period_bound: bool = True,
    ):
        if period <= 0:
            raise ControllerConfigError(f"sensing period must be positive, got {period}")
        if enforce_period_bound:
            for i in range(1, ladder.top + 1):
                slack = ladder.climb_distances[i] - ladder.levels[i] * period
                if slack < ladder.brake_distances[i]:
                    raise ControllerConfigError(
                        f"period {period} s too large: level {i} may travel past its "
                        f"braking threshold between looks "
                        f"({ladder.levels[i] * period} m > "
                        f"{ladder.climb_distances[i] - ladder.brake_distances[i]} m)"
                    )
        adjusted = inflate_ladder(
            ladder, ladder.top_speed * period, require_separation=enforce_period_bound
        )
        super().__init__(adjusted, initial_level, initial_free_distance)
        self.period = period

    def step(self, event) -> ActuationCommand | None:
        """Consume one event; return the actuation to apply, if any."""
        if isinstance(event, UpdateFreeDistance):
            self.f_estimate = event.value
            self.updates_applied += 1
            if self.mode == CRUISE:
                return self._evaluate()
            return None
        if isinstance(event, AccelComplete):
            return self._complete_accel()
        if isinstance(event, BrakeComplete):
            return self._complete_brake()
        if isinstance(event, Tick):
            raise ProtocolError("clock ticks are not a synchronous-controller event")
        raise TypeError(f"unknown controller event {event!r}")


class AsyncController(_LadderController):
    """Sporadically sensed controller with dead reckoning.

    Clock ticks (period ``tick_period``) decrement the local estimate by the
    current level speed times the tick period while cruising; maneuver
    completions subtract the exact closed-form maneuver distance instead
    (ticks are ignored mid-maneuver, otherwise travel would be counted
    twice). A fresh measurement while cruising replaces the estimate and is
    dispatched through the guards immediately; measurements delivered
    mid-maneuver are dropped, since the completion correction already
    accounts for the full maneuver distance and the next cruise-time
    measurement resynchronizes the estimate.

    A measurement delivered *mid-maneuver* is stored as the new estimate;
    the controller counts ticks to know how far into the maneuver the
    measurement was taken, and at completion subtracts only the leg distance
    still ahead of that instant. Dropping such measurements instead would
    leave the post-maneuver estimate at the inflated stop bound whenever the
    climb fired right at its threshold, and the braking band would re-trip
    immediately; the mid-leg refresh carries the distance the lead opened up
    during the maneuver, which is exactly the margin that prevents that.

    Maneuvers start on the tick grid (commands are only issued when a tick
    or a measurement is processed) but complete anywhere inside a tick
    interval. The completion correction pays for travel up to the completion
    instant, so the first tick afterwards covers only the cruise remainder
    of its interval; decrementing the full tick span there would double
    count, and the debt would stack across chained maneuvers. The controller
    derives that remainder from the maneuver duration, keeping the estimate
    equal to the measured budget at every tick instant. Maneuver durations
    are assumed to exceed the tick period, and measurements must be
    delivered at tick boundaries, ticks first.
    """

    __slots__ = ("tick_period", "_next_tick_span", "_leg_ticks", "_leg_remaining")

    def __init__(
        self,
        ladder: SpeedLadder,
        tick_period: float,
        initial_level: int,
        initial_free_distance: float,
    ):
        if tick_period <= 0:
            raise ControllerConfigError(f"tick period must be positive, got {tick_period}")
        adjusted = inflate_ladder(ladder, ladder.top_speed * tick_period)
        super().__init__(adjusted, initial_level, initial_free_distance)
        self.tick_period = tick_period
        self._next_tick_span = None
        self._leg_ticks = 0
        self._leg_remaining = None

    def _arm_straddle_tick(self, maneuver_duration: float) -> None:
        covering_ticks = math.ceil(maneuver_duration / self.tick_period - 1e-9)
        span = covering_ticks * self.tick_period - maneuver_duration
        self._next_tick_span = span if span > 0.0 else 0.0

    def _leg_profile(self):
        """(initial speed, signed rate, total distance, duration) of the leg."""
        base = self.ladder.base
        start = base.levels[self.level]
        end = base.levels[self.target_level]
        profile = base.profile
        if self.mode == ACCELERATING:
            total = base.accel_distances[self.target_level]
            return start, profile.accel_rate, total, (end - start) / profile.accel_rate
        total = base.brake_distances[self.level] - base.brake_distances[self.target_level]
        return start, -profile.brake_rate, total, (start - end) / profile.brake_rate

    def step(self, event) -> ActuationCommand | None:
        """Consume one event; return the actuation to apply, if any."""
        if isinstance(event, Tick):
            if self.mode != CRUISE:
                self._leg_ticks += 1
                return None
            span = self.tick_period if self._next_tick_span is None else self._next_tick_span
            self._next_tick_span = None
            self.f_estimate -= self.ladder.base.levels[self.level] * span
            was_cruising = self.mode
            command = self._evaluate()
            if self.mode != was_cruising:
                self._leg_ticks = 0
                self._leg_remaining = None
            return command
        if isinstance(event, UpdateFreeDistance):
            self.f_estimate = event.value
            self.updates_applied += 1
            self._next_tick_span = None
            if self.mode != CRUISE:
                # Mid-maneuver measurement: remember how much of the leg was
                # still ahead when it was taken, to subtract at completion.
                start, rate, total, _ = self._leg_profile()
                elapsed = self._leg_ticks * self.tick_period
                covered = (start + 0.5 * rate * elapsed) * elapsed
                remaining = total - covered
                self._leg_remaining = remaining if remaining > 0.0 else 0.0
                return None
            command = self._evaluate()
            if self.mode != CRUISE:
                self._leg_ticks = 0
                self._leg_remaining = None
            return command
        if isinstance(event, AccelComplete):
            if self.mode != ACCELERATING:
                raise ProtocolError(f"acceleration-complete event in mode {self.mode_label()}")
            return self._finish_leg(self._complete_accel)
        if isinstance(event, BrakeComplete):
            if self.mode not in (BRAKING, EMERGENCY):
                raise ProtocolError(f"brake-complete event in mode {self.mode_label()}")
            return self._finish_leg(self._complete_brake)
        raise TypeError(f"unknown controller event {event!r}")

    def _finish_leg(self, transition) -> ActuationCommand:
        _, _, total, duration = self._leg_profile()
        owed = total if self._leg_remaining is None else self._leg_remaining
        self.f_estimate -= owed
        self._leg_remaining = None
        self._leg_ticks = 0
        self._arm_straddle_tick(duration)
        return transition()


class IdealController(_LadderController):
    """Point-threshold controller assuming effectively continuous sensing.

    Uses the raw ladder bounds with no inflation and no braking band: brake
    as soon as the measurement reaches the stopping distance, climb as soon
    as it covers the climb bound. Only meaningful when driven densely; under
    coarse sampling it overshoots thresholds and is unsafe by design.
    """

    __slots__ = ()

    def __init__(self, ladder: SpeedLadder, initial_level: int, initial_free_distance: float):
        # Zero inflation: reuse the raw bounds on both band edges.
        adjusted = AdjustedLadder(
            base=ladder,
            horizon=0.0,
            accel_bounds=ladder.climb_distances,
            brake_low=ladder.brake_distances,
            brake_high=ladder.brake_distances,
        )
        super().__init__(adjusted, initial_level, initial_free_distance)

    def _evaluate(self) -> ActuationCommand:
        base = self.ladder.base
        i = self.level
        if i >= 1 and self.f_estimate <= base.brake_distances[i]:
            self.mode = BRAKING
            self.target_level = i - 1
            return ActuationCommand(BRAKE, base.levels[i - 1])
        if i < base.top and self.f_estimate >= base.climb_distances[i + 1]:
            self.mode = ACCELERATING
            self.target_level = i + 1
            return ActuationCommand(ACCELERATE, base.levels[i + 1])
        return ActuationCommand(HOLD, base.levels[i])

    def step(self, event) -> ActuationCommand | None:
        if isinstance(event, UpdateFreeDistance):
            self.f_estimate = event.value
            self.updates_applied += 1
            if self.mode == CRUISE:
                return self._evaluate()
            return None
        if isinstance(event, AccelComplete):
            return self._complete_accel()
        if isinstance(event, BrakeComplete):
            return self._complete_brake()
        if isinstance(event, Tick):
            raise ProtocolError("clock ticks are not an ideal-controller event")
        raise TypeError(f"unknown controller event {event!r}")


def controller_invariant_check(
    controller: _LadderController,
    ground_truth: float,
    rel_tol: float = 1e-9,
) -> bool:
    """Check the dead-reckoning soundness bracket while cruising.

    ``ground_truth`` is the remaining distance the vehicle may still travel
    based on its last applied measurement (measured value minus distance
    travelled since). While cruising, the local estimate must not exceed it,
    and must trail it by at most the estimation horizon:

        f_estimate <= ground_truth <= f_estimate + horizon

    Returns the verdict; modes other than cruise are vacuously true. The
    comparison allows a relative slack of ``rel_tol`` for floating point.
    """
    if controller.mode != CRUISE:
        return True
    slack = rel_tol * max(1.0, abs(ground_truth))
    f = controller.f_estimate
    return f <= ground_truth + slack and ground_truth <= f + controller.ladder.horizon + slack
