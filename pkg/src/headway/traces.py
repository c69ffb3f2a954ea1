"""Per-step run records, their CSV form, and the metric aggregation.

A trace stores one row per sampling step. Numeric fields are rounded to 9
significant digits *when recorded*, which makes the CSV file a lossless
image of the in-memory trace: metrics are defined as a pure fold over the
recorded rows, so recomputing them from a written file reproduces the
in-memory values bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields


def round9(value: float) -> float:
    """Round to 9 significant decimal digits (the trace-file precision)."""
    return float(format(value, ".9g"))


ESTOP_LABEL = "estop"

TRACE_HEADER = ("t", "ego_speed", "lead_speed", "gap", "sensed_F", "mode", "command")


@dataclass
class Trace:
    """Row-per-step record of a closed-loop run plus run metadata.

    ``steady_span`` is the length in seconds of the tail window used for the
    steady-state gap statistics. ``estimate_soundness_ok`` carries the
    dead-reckoning bracket verdict for asynchronous runs (None otherwise);
    it is a run-time check outcome, not part of the persisted rows.
    """

    scenario_hash: str
    seed: int
    steady_span: float
    times: list[float] = field(default_factory=list)
    ego_speeds: list[float] = field(default_factory=list)
    lead_speeds: list[float] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)
    sensed: list[float] = field(default_factory=list)
    modes: list[str] = field(default_factory=list)
    commands: list[str] = field(default_factory=list)
    estimate_soundness_ok: bool | None = None
    # Unrounded end-of-run positions; run-time values, not persisted.
    final_ego_position: float = 0.0
    final_lead_position: float = 0.0

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class Metrics:
    """Aggregates folded from a trace.

    ``total_distance`` integrates the recorded ego speeds over the sampling
    grid (right-endpoint rule) so that it is recomputable from a trace file;
    with the default step sizes it agrees with the exact odometer to well
    under a centimeter per kilometer.
    """

    min_gap: float
    max_speed: float
    collision: bool
    steady_min_gap: float
    steady_max_gap: float
    total_distance: float
    mean_speed: float
    emergency_braking: bool

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def metrics_from_dict(data: dict) -> Metrics:
    return Metrics(**data)


def compute_metrics(trace: Trace) -> Metrics:
    """Fold a trace into :class:`Metrics`. Pure function of the rows."""
    times = trace.times
    gaps = trace.gaps
    speeds = trace.ego_speeds
    if not times:
        raise ValueError("cannot compute metrics of an empty trace")
    min_gap = min(gaps)
    max_speed = max(speeds)
    collision = min_gap <= 0.0
    threshold = times[-1] - trace.steady_span
    steady_min = None
    steady_max = None
    for t, g in zip(times, gaps):
        if t >= threshold:
            if steady_min is None or g < steady_min:
                steady_min = g
            if steady_max is None or g > steady_max:
                steady_max = g
    total = 0.0
    for k in range(1, len(times)):
        total += speeds[k] * (times[k] - times[k - 1])
    span = times[-1] - times[0]
    mean_speed = total / span if span > 0 else 0.0
    return Metrics(
        min_gap=min_gap,
        max_speed=max_speed,
        collision=collision,
        steady_min_gap=steady_min,
        steady_max_gap=steady_max,
        total_distance=total,
        mean_speed=mean_speed,
        emergency_braking=ESTOP_LABEL in trace.commands,
    )


def write_trace(trace: Trace, path) -> None:
    """Write the trace as CSV with one leading metadata comment line."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(
            f"# scenario={trace.scenario_hash} seed={trace.seed} "
            f"steady_span={format(trace.steady_span, '.9g')}\n"
        )
        handle.write(",".join(TRACE_HEADER) + "\n")
        rows = zip(
            trace.times,
            trace.ego_speeds,
            trace.lead_speeds,
            trace.gaps,
            trace.sensed,
            trace.modes,
            trace.commands,
        )
        for t, ego, lead, gap, sensed, mode, command in rows:
            handle.write(
                f"{format(t, '.9g')},{format(ego, '.9g')},{format(lead, '.9g')},"
                f"{format(gap, '.9g')},{format(sensed, '.9g')},{mode},{command}\n"
            )


def read_trace(path) -> Trace:
    """Read a trace CSV written by :func:`write_trace`."""
    with open(path, "r", encoding="utf-8") as handle:
        meta_line = handle.readline().strip()
        if not meta_line.startswith("# "):
            raise ValueError(f"{path}: missing metadata comment line")
        meta = dict(part.split("=", 1) for part in meta_line[2:].split(" "))
        header = handle.readline().strip()
        if tuple(header.split(",")) != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        trace = Trace(
            scenario_hash=meta["scenario"],
            seed=int(meta["seed"]),
            steady_span=float(meta["steady_span"]),
        )
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            t, ego, lead, gap, sensed, mode, command = line.split(",")
            trace.times.append(float(t))
            trace.ego_speeds.append(float(ego))
            trace.lead_speeds.append(float(lead))
            trace.gaps.append(float(gap))
            trace.sensed.append(float(sensed))
            trace.modes.append(mode)
            trace.commands.append(command)
    return trace


def write_metrics(metrics: Metrics, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(metrics.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_metrics(path) -> Metrics:
    with open(path, "r", encoding="utf-8") as handle:
        return metrics_from_dict(json.load(handle))
