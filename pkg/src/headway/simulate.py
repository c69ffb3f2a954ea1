"""Closed-loop longitudinal world: ego vehicle, lead vehicle, sensing.

The world advances on a fixed sampling grid, but nothing is integrated
numerically: both vehicles follow piecewise closed-form trajectories whose
segment boundaries (actuation changes and maneuver completions) are solved
exactly. Sampling therefore only chooses where the trajectory is *recorded*;
halving the step changes end-of-run positions by nothing but floating-point
noise, and identical scenarios yield identical traces.

Event order within a step: maneuver completions at their exact solved times,
then the controller clock tick (async), then the sensing update, commands
taking effect at the event's own timestamp. Completions win ties.
"""

from __future__ import annotations

import random

from .controllers import (
    ACCEL_COMPLETE,
    ACCELERATE,
    AsyncController,
    BRAKE,
    BRAKE_COMPLETE,
    CRUISE,
    EMERGENCY_BRAKE,
    HOLD,
    TICK,
    UpdateFreeDistance,
    controller_invariant_check,
)
from .scenario import ASYNC, PERIODIC, Scenario
from .traces import ESTOP_LABEL, Metrics, Trace, compute_metrics, round9

# Tolerance for deciding that a solved completion time falls on or before a
# grid boundary; real gaps between distinct events are >= one tick.
_TIME_SLACK = 1e-9


def free_distance(gap: float, lead_speed: float, setting: int, lead_brake_rate: float) -> float:
    """Sensed free distance for the two sensing modes.

    Setting 1 reports the raw bumper-to-bumper gap (the lead may stop dead
    at any instant). Setting 2 credits the lead with its own stopping
    distance at ``lead_brake_rate``.
    """
    if setting == 1:
        return gap
    return gap + lead_speed * lead_speed / (2.0 * lead_brake_rate)


class EgoTrack:
    """Exact piecewise trajectory of the controlled vehicle.

    Holds one anchor (time, position, speed) plus the active rate and target
    speed; positions and speeds at later times are closed-form evaluations.
    Re-anchored whenever an actuation is applied or a maneuver completes.
    """

    __slots__ = (
        "accel_rate",
        "brake_rate",
        "anchor_time",
        "anchor_pos",
        "anchor_speed",
        "rate",
        "target_speed",
        "completion_time",
        "completion_event",
    )

    def __init__(self, initial_speed: float, accel_rate: float, brake_rate: float):
        self.accel_rate = accel_rate
        self.brake_rate = brake_rate
        self.anchor_time = 0.0
        self.anchor_pos = 0.0
        self.anchor_speed = initial_speed
        self.rate = 0.0
        self.target_speed = initial_speed
        self.completion_time = None
        self.completion_event = None

    def speed_at(self, t: float) -> float:
        if self.rate == 0.0 or (self.completion_time is not None and t >= self.completion_time):
            return self.target_speed if self.rate != 0.0 else self.anchor_speed
        return self.anchor_speed + self.rate * (t - self.anchor_time)

    def position_at(self, t: float) -> float:
        if self.rate == 0.0:
            return self.anchor_pos + self.anchor_speed * (t - self.anchor_time)
        if self.completion_time is not None and t > self.completion_time:
            ramp = self.completion_time - self.anchor_time
            at_completion = self.anchor_pos + (self.anchor_speed + 0.5 * self.rate * ramp) * ramp
            return at_completion + self.target_speed * (t - self.completion_time)
        elapsed = t - self.anchor_time
        return self.anchor_pos + (self.anchor_speed + 0.5 * self.rate * elapsed) * elapsed

    def apply(self, action: str, target_speed: float, t: float) -> None:
        """Switch the actuation at time ``t``; solves the completion time."""
        pos = self.position_at(t)
        speed = self.speed_at(t)
        self.anchor_time = t
        self.anchor_pos = pos
        self.anchor_speed = speed
        self.target_speed = target_speed
        if action == HOLD:
            self.rate = 0.0
            self.completion_time = None
            self.completion_event = None
        elif action == ACCELERATE:
            self.rate = self.accel_rate
            self.completion_time = t + (target_speed - speed) / self.accel_rate
            self.completion_event = ACCEL_COMPLETE
        else:  # brake or emergency brake
            self.rate = -self.brake_rate
            self.completion_time = t + (speed - target_speed) / self.brake_rate
            self.completion_event = BRAKE_COMPLETE
        if self.completion_time is not None and self.completion_time <= t:
            # Degenerate zero-length maneuver: complete immediately.
            self.completion_time = t

    def complete(self):
        """Clamp at the target speed and return the completion event."""
        t = self.completion_time
        event = self.completion_event
        ramp = t - self.anchor_time
        self.anchor_pos = self.anchor_pos + (self.anchor_speed + 0.5 * self.rate * ramp) * ramp
        self.anchor_time = t
        self.anchor_speed = self.target_speed
        self.rate = 0.0
        self.completion_time = None
        self.completion_event = None
        return event


def _update_schedule(scenario: Scenario, steps: int) -> set:
    """Step indices at which a sensing update is delivered.

    The jittered law delays each nominal instant by a uniform draw from
    [0, update_jitter], quantized to the controller's tick grid so that the
    dead-reckoning bracket stays exact at delivery instants.
    """
    per = round(scenario.sensing_period / scenario.time_step)
    if scenario.update_law == PERIODIC:
        return set(range(0, steps + 1, per))
    rng = random.Random(scenario.seed)
    tick_steps = round(scenario.tick_period / scenario.time_step)
    max_ticks = per // tick_steps - 1
    schedule = set()
    for k in range(steps // per + 1):
        delay = rng.uniform(0.0, scenario.update_jitter)
        offset = min(int(round(delay / scenario.tick_period)), max_ticks)
        index = k * per + offset * tick_steps
        if index <= steps:
            schedule.add(index)
    return schedule


_CMD_LABELS = {ACCELERATE: "accel", BRAKE: "brake", HOLD: "hold", EMERGENCY_BRAKE: ESTOP_LABEL}


def _command_label(command) -> str:
    if command.action == EMERGENCY_BRAKE:
        return ESTOP_LABEL
    return f"{_CMD_LABELS[command.action]}:{format(command.target_speed, '.9g')}"


def run_scenario(scenario: Scenario) -> tuple[Trace, Metrics]:
    """Run the closed loop for the configured duration.

    Returns the per-step trace and its folded metrics. The run is rejected
    up front if the scenario violates any construction invariant. Collisions
    do not abort the run; they set the collision flag in the metrics.
    """
    scenario.validate()
    controller = scenario.build_controller()
    profile = scenario.profile
    lead = scenario.lead
    lead_speed = lead.speed
    lead_travel = lead.travel
    setting = scenario.setting
    lead_brake = lead.brake_rate

    dt = scenario.time_step
    steps = round(scenario.duration / dt)
    tick_steps = round(scenario.tick_period / dt) if scenario.controller == ASYNC else 0
    update_steps = _update_schedule(scenario, steps)

    ego = EgoTrack(scenario.initial_speed, profile.accel_rate, profile.brake_rate)
    gap0 = scenario.initial_gap

    is_async = isinstance(controller, AsyncController)
    sound_ok = True
    sensed_now = scenario.initial_sensed_distance()
    anchor_f = sensed_now
    anchor_pos = 0.0

    trace = Trace(
        scenario_hash=scenario.content_hash(),
        seed=scenario.seed,
        steady_span=scenario.steady_span(),
    )
    times = trace.times
    ego_speeds = trace.ego_speeds
    lead_speeds = trace.lead_speeds
    gaps = trace.gaps
    sensed_col = trace.sensed
    modes = trace.modes
    commands = trace.commands

    mode_label = controller.mode_label()
    step_cmd = ""

    def deliver(event, t):
        nonlocal step_cmd, mode_label
        command = controller.step(event)
        if command is not None:
            ego.apply(command.action, command.target_speed, t)
            step_cmd = _command_label(command)
        mode_label = controller.mode_label()

    # Time zero: deliver the initial sensing update (if scheduled) and record.
    if 0 in update_steps:
        deliver(UpdateFreeDistance(sensed_now), 0.0)
    times.append(0.0)
    ego_speeds.append(round9(scenario.initial_speed))
    lead_speeds.append(round9(lead_speed(0.0)))
    gaps.append(round9(gap0))
    sensed_col.append(round9(sensed_now))
    modes.append(mode_label)
    commands.append(step_cmd)

    for k in range(1, steps + 1):
        t1 = k * dt
        step_cmd = ""

        while ego.completion_time is not None and ego.completion_time <= t1 + _TIME_SLACK:
            tc = ego.completion_time
            deliver(ego.complete(), tc)

        if tick_steps and k % tick_steps == 0:
            deliver(TICK, t1)

        ego_pos = ego.position_at(t1)
        gap = gap0 + lead_travel(t1) - ego_pos
        lead_v = lead_speed(t1)

        if k in update_steps:
            # The sensor cannot report negative headway; the raw gap column
            # still records overlap for collision detection.
            sensed_now = free_distance(gap, lead_v, setting, lead_brake)
            if sensed_now < 0.0:
                sensed_now = 0.0
            if is_async and controller.mode == CRUISE:
                remaining = anchor_f - (ego_pos - anchor_pos)
                if not controller_invariant_check(controller, remaining):
                    sound_ok = False
            applied_before = controller.updates_applied
            deliver(UpdateFreeDistance(sensed_now), t1)
            if controller.updates_applied != applied_before:
                anchor_f = sensed_now
                anchor_pos = ego_pos

        times.append(round9(t1))
        ego_speeds.append(round9(ego.speed_at(t1)))
        lead_speeds.append(round9(lead_v))
        gaps.append(round9(gap))
        sensed_col.append(round9(sensed_now))
        modes.append(mode_label)
        commands.append(step_cmd)

    trace.estimate_soundness_ok = sound_ok if is_async else None
    end_time = steps * dt
    trace.final_ego_position = ego.position_at(end_time)
    trace.final_lead_position = gap0 + lead_travel(end_time)
    return trace, compute_metrics(trace)
