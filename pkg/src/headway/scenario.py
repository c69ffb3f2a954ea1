"""Scenario definition, validation, and its JSON file form.

A scenario pins everything a closed-loop run needs: vehicle rates, ladder
levels, controller kind and timing, sensing mode, lead profile, initial
conditions, duration and sampling step. Files are strict JSON mirrors of
the dataclass: unknown keys are rejected and all units are SI.

Three error classes keep failure modes distinguishable: parse (not JSON),
schema (wrong keys/types), invariant (well-formed but physically or
numerically inconsistent).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

from .controllers import AsyncController, ControllerConfigError, IdealController, SyncController
from .kinematics import DomainError, KinematicProfile, LadderError, build_speed_ladder
from .leads import LEAD_REQUIRED_KEYS, LeadProfileError, lead_from_dict, lead_to_dict
from .policy import is_safe

SYNC = "sync"
ASYNC = "async"
IDEAL = "ideal"
CONTROLLERS = (SYNC, ASYNC, IDEAL)

PERIODIC = "periodic"
JITTERED = "jittered"
UPDATE_LAWS = (PERIODIC, JITTERED)

# Largest default sampling step; keeps collision checks reasonably dense
# even when the sensing period is huge.
MAX_DEFAULT_STEP = 0.05


class ScenarioError(Exception):
    """Base class for scenario loading/validation failures."""


class ScenarioParseError(ScenarioError):
    """The file is not valid JSON."""


class ScenarioSchemaError(ScenarioError):
    """The document shape is wrong: unknown, missing or mistyped keys."""


class ScenarioInvariantError(ScenarioError):
    """Values are well-formed but inconsistent (units, ratios, safety)."""


@dataclass(frozen=True)
class Scenario:
    name: str
    profile: KinematicProfile
    levels: tuple[float, ...]
    controller: str
    setting: int
    lead: object
    sensing_period: float
    initial_gap: float
    initial_speed: float
    duration: float
    time_step: float
    tick_period: float = 0.005
    update_law: str = PERIODIC
    update_jitter: float = 0.0
    seed: int = 0
    description: str = ""
    allow_period_bound_violation: bool = False

    # -- derived helpers ------------------------------------------------------

    def ladder(self):
        return build_speed_ladder(self.profile, self.levels)

    def initial_level(self) -> int:
        for index, level in enumerate(self.ladder().levels):
            if math.isclose(level, self.initial_speed, rel_tol=1e-9, abs_tol=1e-9):
                return index
        raise ScenarioInvariantError(
            f"initial_speed {self.initial_speed} m/s does not match any ladder level"
        )

    def initial_sensed_distance(self) -> float:
        extra = 0.0
        if self.setting == 2:
            v0 = self.lead.speed(0.0)
            extra = v0 * v0 / (2.0 * self.lead.brake_rate)
        return self.initial_gap + extra

    def steady_span(self) -> float:
        """Tail window for steady-state statistics: two lead periods when the
        lead is periodic, otherwise the final half of the run."""
        period = getattr(self.lead, "period", None)
        if period is not None and 2.0 * period <= self.duration:
            return 2.0 * period
        return self.duration / 2.0

    def build_controller(self):
        ladder = self.ladder()
        level = self.initial_level()
        sensed = self.initial_sensed_distance()
        if self.controller == SYNC:
            return SyncController(
                ladder,
                self.sensing_period,
                level,
                sensed,
                enforce_period_bound=not self.allow_period_bound_violation,
            )
        if self.controller == ASYNC:
            return AsyncController(ladder, self.tick_period, level, sensed)
        return IdealController(ladder, level, sensed)

    def canonical_dict(self) -> dict:
        return scenario_to_dict(self)

    def content_hash(self) -> str:
        payload = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)

    # -- validation -----------------------------------------------------------

    def validate(self) -> None:
        """Raise ScenarioInvariantError on any inconsistency."""
        if self.controller not in CONTROLLERS:
            raise ScenarioInvariantError(f"controller must be one of {CONTROLLERS}")
        if self.setting not in (1, 2):
            raise ScenarioInvariantError(f"setting must be 1 or 2, got {self.setting}")
        if self.update_law not in UPDATE_LAWS:
            raise ScenarioInvariantError(f"update_law must be one of {UPDATE_LAWS}")
        if self.sensing_period <= 0:
            raise ScenarioInvariantError("sensing_period must be positive")
        if self.duration <= 0:
            raise ScenarioInvariantError("duration must be positive")
        if self.time_step <= 0:
            raise ScenarioInvariantError("time_step must be positive")
        if self.initial_gap < 0:
            raise ScenarioInvariantError("initial_gap must be nonnegative")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ScenarioInvariantError("seed must be a nonnegative integer")

        try:
            ladder = self.ladder()
        except (LadderError, DomainError) as exc:
            raise ScenarioInvariantError(str(exc)) from exc

        if self.setting == 2 and self.lead.brake_rate <= 0:
            raise ScenarioInvariantError(
                "setting 2 adds the lead's stopping distance and needs lead.brake_rate > 0"
            )

        # Sampling-step discipline: the step must tile the duration and the
        # event periods exactly, and leave at least two samples per period.
        _exact_ratio("duration / time_step", self.duration, self.time_step)
        _exact_ratio("sensing_period / time_step", self.sensing_period, self.time_step)
        if self.controller == ASYNC:
            if self.tick_period <= 0:
                raise ScenarioInvariantError("tick_period must be positive")
            _exact_ratio("tick_period / time_step", self.tick_period, self.time_step)
            _exact_ratio("sensing_period / tick_period", self.sensing_period, self.tick_period)
            if self.time_step > min(self.sensing_period, self.tick_period) / 2.0 + 1e-12:
                raise ScenarioInvariantError(
                    "time_step must be at most half the sensing and tick periods"
                )
        elif self.controller == SYNC:
            if self.time_step > self.sensing_period / 2.0 + 1e-12:
                raise ScenarioInvariantError("time_step must be at most half the sensing period")
        else:
            if self.time_step > self.sensing_period + 1e-12:
                raise ScenarioInvariantError("time_step must not exceed the sensing period")

        if self.update_law == JITTERED:
            if self.controller != ASYNC:
                raise ScenarioInvariantError("jittered sensing applies to the async controller only")
            if not 0.0 <= self.update_jitter <= self.sensing_period - self.tick_period:
                raise ScenarioInvariantError(
                    "update_jitter must lie in [0, sensing_period - tick_period]"
                )

        level = self.initial_level()
        sensed = self.initial_sensed_distance()
        if not is_safe(self.profile, ladder.levels[level], sensed):
            raise ScenarioInvariantError(
                f"initial state is unsafe: speed {ladder.levels[level]} m/s cannot stop "
                f"within the initial sensed distance {sensed} m"
            )
        try:
            self.build_controller()
        except ControllerConfigError as exc:
            raise ScenarioInvariantError(str(exc)) from exc


def _exact_ratio(label: str, numerator: float, denominator: float) -> int:
    ratio = numerator / denominator
    count = round(ratio)
    if count < 1 or abs(count * denominator - numerator) > 1e-9 * max(1.0, abs(numerator)):
        raise ScenarioInvariantError(f"{label} must be a positive whole number, got {ratio}")
    return count


# -- JSON form ----------------------------------------------------------------

_TOP_KEYS = {
    "name": str,
    "description": str,
    "seed": int,
    "controller": str,
    "setting": int,
    "vehicle": dict,
    "levels": list,
    "num_levels": int,
    "sensing_period": (int, float),
    "tick_period": (int, float),
    "update_law": str,
    "update_jitter": (int, float),
    "lead": dict,
    "initial_gap": (int, float),
    "initial_speed": (int, float),
    "duration": (int, float),
    "time_step": (int, float),
    "allow_period_bound_violation": bool,
}
_REQUIRED_KEYS = (
    "name",
    "controller",
    "setting",
    "vehicle",
    "sensing_period",
    "lead",
    "initial_gap",
    "initial_speed",
    "duration",
)
_VEHICLE_KEYS = ("accel_rate", "brake_rate", "limit_speed")


def default_time_step(controller: str, sensing_period: float, tick_period: float) -> float:
    """Default sampling step: half the finest event period, capped at 50 ms."""
    if controller == ASYNC:
        return tick_period / 2.0
    if controller == IDEAL:
        base = sensing_period
    else:
        base = sensing_period / 2.0
    if base <= MAX_DEFAULT_STEP:
        return base
    return sensing_period / math.ceil(sensing_period / MAX_DEFAULT_STEP)


def scenario_from_dict(data: dict) -> Scenario:
    """Build and validate a Scenario from its JSON dict form."""
    if not isinstance(data, dict):
        raise ScenarioSchemaError("scenario document must be a JSON object")
    unknown = sorted(set(data) - set(_TOP_KEYS))
    if unknown:
        raise ScenarioSchemaError(f"unknown scenario keys: {unknown}")
    missing = sorted(k for k in _REQUIRED_KEYS if k not in data)
    if missing:
        raise ScenarioSchemaError(f"missing scenario keys: {missing}")
    for key, value in data.items():
        expected = _TOP_KEYS[key]
        if key == "seed" and isinstance(value, bool):
            raise ScenarioSchemaError("seed must be an integer")
        if not isinstance(value, expected):
            raise ScenarioSchemaError(
                f"key {key!r} has type {type(value).__name__}, expected {expected}"
            )

    vehicle = data["vehicle"]
    extra = sorted(set(vehicle) - set(_VEHICLE_KEYS))
    if extra:
        raise ScenarioSchemaError(f"unknown vehicle keys: {extra}")
    missing = sorted(set(_VEHICLE_KEYS) - set(vehicle))
    if missing:
        raise ScenarioSchemaError(f"missing vehicle keys: {missing}")
    try:
        profile = KinematicProfile(
            accel_rate=float(vehicle["accel_rate"]),
            brake_rate=float(vehicle["brake_rate"]),
            limit_speed=float(vehicle["limit_speed"]),
        )
    except DomainError as exc:
        raise ScenarioInvariantError(str(exc)) from exc

    if ("levels" in data) == ("num_levels" in data):
        raise ScenarioSchemaError("exactly one of 'levels' or 'num_levels' is required")
    if "levels" in data:
        levels = tuple(float(v) for v in data["levels"])
    else:
        count = data["num_levels"]
        if count < 1:
            raise ScenarioInvariantError("num_levels must be at least 1")
        levels = tuple(profile.limit_speed * k / count for k in range(1, count + 1))

    lead_data = data["lead"]
    kind = lead_data.get("kind")
    if kind not in LEAD_REQUIRED_KEYS:
        raise ScenarioSchemaError(f"lead: unknown kind {kind!r}")
    required = set(LEAD_REQUIRED_KEYS[kind])
    allowed = required | {"kind", "brake_rate"}
    extra = sorted(set(lead_data) - allowed)
    if extra:
        raise ScenarioSchemaError(f"lead: unknown keys {extra}")
    missing = sorted(required - set(lead_data))
    if missing:
        raise ScenarioSchemaError(f"lead: missing keys {missing}")
    try:
        lead = lead_from_dict(lead_data)
    except LeadProfileError as exc:
        # The shape was right, so the values are inconsistent.
        raise ScenarioInvariantError(f"lead: {exc}") from exc

    controller = data["controller"]
    sensing_period = float(data["sensing_period"])
    tick_period = float(data.get("tick_period", 0.005))
    time_step = float(
        data.get("time_step", default_time_step(controller, sensing_period, tick_period))
    )

    scenario = Scenario(
        name=data["name"],
        profile=profile,
        levels=levels,
        controller=controller,
        setting=data["setting"],
        lead=lead,
        sensing_period=sensing_period,
        tick_period=tick_period,
        update_law=data.get("update_law", PERIODIC),
        update_jitter=float(data.get("update_jitter", 0.0)),
        initial_gap=float(data["initial_gap"]),
        initial_speed=float(data["initial_speed"]),
        duration=float(data["duration"]),
        time_step=time_step,
        seed=data.get("seed", 0),
        description=data.get("description", ""),
        allow_period_bound_violation=data.get("allow_period_bound_violation", False),
    )
    scenario.validate()
    return scenario


def scenario_to_dict(scenario: Scenario) -> dict:
    data = {
        "name": scenario.name,
        "description": scenario.description,
        "seed": scenario.seed,
        "controller": scenario.controller,
        "setting": scenario.setting,
        "vehicle": {
            "accel_rate": scenario.profile.accel_rate,
            "brake_rate": scenario.profile.brake_rate,
            "limit_speed": scenario.profile.limit_speed,
        },
        "levels": list(scenario.levels),
        "sensing_period": scenario.sensing_period,
        "tick_period": scenario.tick_period,
        "update_law": scenario.update_law,
        "update_jitter": scenario.update_jitter,
        "lead": lead_to_dict(scenario.lead),
        "initial_gap": scenario.initial_gap,
        "initial_speed": scenario.initial_speed,
        "duration": scenario.duration,
        "time_step": scenario.time_step,
        "allow_period_bound_violation": scenario.allow_period_bound_violation,
    }
    return data


def load_scenario(path) -> Scenario:
    """Load a scenario file; raises a distinguishable ScenarioError subclass."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: {exc}") from exc
    try:
        return scenario_from_dict(data)
    except ScenarioError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(scenario_to_dict(scenario), handle, indent=2, sort_keys=True)
        handle.write("\n")
