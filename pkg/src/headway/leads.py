"""Lead-vehicle speed profiles with exactly integrable positions.

Every profile exposes ``speed(t)`` and ``travel(t)`` (distance covered since
t=0) in closed form, so the simulated world needs no numeric integration for
the lead vehicle. All profiles are non-reversing: speeds are nonnegative at
every time, hence travel is monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class LeadProfileError(ValueError):
    """Invalid lead-profile parameters."""


@dataclass(frozen=True)
class SinusoidalLead:
    """Speed oscillating as ``base_speed * (1 + sin(2*pi*t/period))``.

    Ranges over [0, 2*base_speed] and never reverses. ``brake_rate`` is the
    deceleration credited to the lead when the sensing mode adds its own
    stopping distance to the measured gap.
    """

    base_speed: float
    period: float
    brake_rate: float = 0.0

    def __post_init__(self) -> None:
        if self.base_speed < 0:
            raise LeadProfileError(f"base_speed must be nonnegative, got {self.base_speed}")
        if self.period <= 0:
            raise LeadProfileError(f"period must be positive, got {self.period}")
        if self.brake_rate < 0:
            raise LeadProfileError(f"brake_rate must be nonnegative, got {self.brake_rate}")

    def speed(self, t: float) -> float:
        omega = 2.0 * math.pi / self.period
        value = self.base_speed * (1.0 + math.sin(omega * t))
        return value if value > 0.0 else 0.0

    def travel(self, t: float) -> float:
        omega = 2.0 * math.pi / self.period
        return self.base_speed * t + self.base_speed * (1.0 - math.cos(omega * t)) / omega


@dataclass(frozen=True)
class ConstantLead:
    """Lead moving at a fixed nonnegative speed."""

    speed_value: float
    brake_rate: float = 0.0

    def __post_init__(self) -> None:
        if self.speed_value < 0:
            raise LeadProfileError(f"speed must be nonnegative, got {self.speed_value}")
        if self.brake_rate < 0:
            raise LeadProfileError(f"brake_rate must be nonnegative, got {self.brake_rate}")

    def speed(self, t: float) -> float:
        return self.speed_value

    def travel(self, t: float) -> float:
        return self.speed_value * t


@dataclass(frozen=True)
class StationaryLead:
    """A fixed obstacle."""

    brake_rate: float = 0.0

    def speed(self, t: float) -> float:
        return 0.0

    def travel(self, t: float) -> float:
        return 0.0


@dataclass(frozen=True)
class PiecewiseLead:
    """Piecewise-constant speed given as ((t0, v0), (t1, v1), ...).

    Speed is ``v_k`` on [t_k, t_{k+1}); the last speed holds forever. Speed
    changes are instantaneous, which deliberately includes hard stops (a
    lead vanishing from motion to standstill between two samples).
    """

    points: tuple[tuple[float, float], ...]
    brake_rate: float = 0.0

    def __post_init__(self) -> None:
        if not self.points:
            raise LeadProfileError("piecewise profile needs at least one (time, speed) point")
        if self.points[0][0] != 0.0:
            raise LeadProfileError("piecewise profile must start at t=0")
        previous = None
        for t, v in self.points:
            if v < 0:
                raise LeadProfileError(f"piecewise speeds must be nonnegative, got {v}")
            if previous is not None and t <= previous:
                raise LeadProfileError("piecewise breakpoints must be strictly increasing")
            previous = t
        if self.brake_rate < 0:
            raise LeadProfileError(f"brake_rate must be nonnegative, got {self.brake_rate}")

    def speed(self, t: float) -> float:
        current = self.points[0][1]
        for start, v in self.points:
            if t < start:
                break
            current = v
        return current

    def travel(self, t: float) -> float:
        total = 0.0
        for i, (start, v) in enumerate(self.points):
            if t <= start:
                break
            end = self.points[i + 1][0] if i + 1 < len(self.points) else t
            total += v * (min(t, end) - start)
        return total


LEAD_KINDS = {
    "sinusoidal": SinusoidalLead,
    "constant": ConstantLead,
    "stationary": StationaryLead,
    "piecewise": PiecewiseLead,
}

# Required JSON keys per kind; brake_rate is optional everywhere.
LEAD_REQUIRED_KEYS = {
    "sinusoidal": ("base_speed", "period"),
    "constant": ("speed",),
    "stationary": (),
    "piecewise": ("points",),
}


def lead_to_dict(lead) -> dict:
    """Serialize a lead profile to its JSON form."""
    if isinstance(lead, SinusoidalLead):
        return {
            "kind": "sinusoidal",
            "base_speed": lead.base_speed,
            "period": lead.period,
            "brake_rate": lead.brake_rate,
        }
    if isinstance(lead, ConstantLead):
        return {"kind": "constant", "speed": lead.speed_value, "brake_rate": lead.brake_rate}
    if isinstance(lead, StationaryLead):
        return {"kind": "stationary", "brake_rate": lead.brake_rate}
    if isinstance(lead, PiecewiseLead):
        return {
            "kind": "piecewise",
            "points": [[t, v] for t, v in lead.points],
            "brake_rate": lead.brake_rate,
        }
    raise LeadProfileError(f"unknown lead profile {lead!r}")


def lead_from_dict(data: dict):
    """Deserialize a lead profile; raises LeadProfileError on bad shape."""
    if not isinstance(data, dict) or "kind" not in data:
        raise LeadProfileError("lead profile must be an object with a 'kind' key")
    extra = dict(data)
    kind = extra.pop("kind")
    brake_rate = float(extra.pop("brake_rate", 0.0))
    try:
        if kind == "sinusoidal":
            lead = SinusoidalLead(
                base_speed=float(extra.pop("base_speed")),
                period=float(extra.pop("period")),
                brake_rate=brake_rate,
            )
        elif kind == "constant":
            lead = ConstantLead(speed_value=float(extra.pop("speed")), brake_rate=brake_rate)
        elif kind == "stationary":
            lead = StationaryLead(brake_rate=brake_rate)
        elif kind == "piecewise":
            points = tuple((float(t), float(v)) for t, v in extra.pop("points"))
            lead = PiecewiseLead(points=points, brake_rate=brake_rate)
        else:
            raise LeadProfileError(f"unknown lead kind {kind!r}")
    except KeyError as exc:
        raise LeadProfileError(f"lead profile is missing key {exc}") from exc
    if extra:
        raise LeadProfileError(f"unknown lead keys {sorted(extra)}")
    return lead
