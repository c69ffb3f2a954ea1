"""Built-in reference evaluation suite.

Reconstructs the published evaluation protocol for this controller family at
desk scale: a sinusoidally driven lead vehicle approached from rest, swept
over the lead's speed period, the ladder granularity and the sensing period,
in two sensing modes and for both discrete controllers. Absolute gap values
from the original vehicle-dynamics environment are not reproducible with
idealized kinematics, so the suite asserts the qualitative orderings and
reports a loose quantitative comparison against the published figures.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .kinematics import KinematicProfile
from .leads import SinusoidalLead
from .scenario import ASYNC, PERIODIC, SYNC, Scenario, default_time_step
from .simulate import run_scenario
from .traces import write_trace

REFERENCE_PROFILE = KinematicProfile(accel_rate=2.0, brake_rate=2.0, limit_speed=32.0)
LEAD_BASE_SPEED = 14.0
LEAD_BRAKE_RATE = 5.0
INITIAL_GAP = 5.0
TICK_PERIOD = 0.005

LEAD_PERIODS = (10.0, 20.0, 30.0)
LEVEL_COUNTS = (2, 4, 6, 8)
SENSING_PERIODS = (0.02, 0.1, 10.0)
SAFETY_SENSING_PERIODS = (0.02, 0.1)

# Published steady-state minimum gaps (m) for the synchronous controller;
# used for the loose +-25% comparison in the report. Keys:
# (controller, setting, lead_period, num_levels, sensing_period).
PUBLISHED_STEADY_MIN_GAP = {
    (SYNC, 1, 10.0, 8, 0.02): 57.27,
    (SYNC, 1, 30.0, 8, 0.02): 20.11,
    (SYNC, 1, 20.0, 2, 0.02): 60.49,
    (SYNC, 1, 20.0, 8, 0.02): 33.32,
    (SYNC, 2, 30.0, 8, 0.02): 11.26,
    (SYNC, 2, 20.0, 8, 0.02): 17.29,
}
QUANT_BAND = 0.25


def scenario_key(controller: str, setting: int, lead_period: float, num_levels: int,
                 sensing_period: float) -> str:
    return f"{controller}-s{setting}-tf{lead_period:g}-n{num_levels}-T{sensing_period:g}"


def reference_scenario(
    controller: str,
    setting: int,
    lead_period: float,
    num_levels: int,
    sensing_period: float,
    *,
    seed: int = 0,
    duration: float | None = None,
) -> Scenario:
    """One run of the reference protocol: ego from rest at a 5 m gap behind
    a sinusoidal lead, evenly spaced ladder up to the limit speed."""
    if duration is None:
        duration = 4.0 * lead_period
    levels = tuple(
        REFERENCE_PROFILE.limit_speed * k / num_levels for k in range(1, num_levels + 1)
    )
    return Scenario(
        name=scenario_key(controller, setting, lead_period, num_levels, sensing_period),
        profile=REFERENCE_PROFILE,
        levels=levels,
        controller=controller,
        setting=setting,
        lead=SinusoidalLead(
            base_speed=LEAD_BASE_SPEED, period=lead_period, brake_rate=LEAD_BRAKE_RATE
        ),
        sensing_period=sensing_period,
        tick_period=TICK_PERIOD,
        update_law=PERIODIC,
        initial_gap=INITIAL_GAP,
        initial_speed=0.0,
        duration=duration,
        time_step=default_time_step(controller, sensing_period, TICK_PERIOD),
        seed=seed,
        allow_period_bound_violation=sensing_period >= 1.0,
    )


def safety_matrix(seed: int = 0) -> list[Scenario]:
    """The 96-run closed-loop safety sweep: both controllers, all lead
    periods, all ladder sizes, the two sub-second sensing periods, both
    sensing modes."""
    runs = []
    for controller in (SYNC, ASYNC):
        for lead_period in LEAD_PERIODS:
            for num_levels in LEVEL_COUNTS:
                for sensing_period in SAFETY_SENSING_PERIODS:
                    for setting in (1, 2):
                        runs.append(
                            reference_scenario(
                                controller, setting, lead_period, num_levels,
                                sensing_period, seed=seed,
                            )
                        )
    return runs


def experiment_matrix(seed: int = 0, quick: bool = False) -> list[Scenario]:
    """The full reference grid (144 runs), or the trend-essential subset."""
    if quick:
        picks = [
            (SYNC, 1, 10.0, 8, 0.02),
            (SYNC, 1, 30.0, 8, 0.02),
            (SYNC, 1, 20.0, 2, 0.02),
            (SYNC, 1, 20.0, 8, 0.02),
            (SYNC, 2, 10.0, 8, 0.02),
            (SYNC, 2, 30.0, 8, 0.02),
            (SYNC, 2, 20.0, 2, 0.02),
            (SYNC, 2, 20.0, 8, 0.02),
            (ASYNC, 1, 10.0, 8, 0.02),
            (ASYNC, 2, 10.0, 8, 0.02),
        ]
        return [reference_scenario(*pick, seed=seed) for pick in picks]
    runs = []
    for controller in (SYNC, ASYNC):
        for setting in (1, 2):
            for lead_period in LEAD_PERIODS:
                for num_levels in LEVEL_COUNTS:
                    for sensing_period in SENSING_PERIODS:
                        runs.append(
                            reference_scenario(
                                controller, setting, lead_period, num_levels,
                                sensing_period, seed=seed,
                            )
                        )
    return runs


def _run_one(args):
    scenario, keep_trace = args
    trace, metrics = run_scenario(scenario)
    return scenario.name, metrics, (trace if keep_trace else None), trace.estimate_soundness_ok


def run_matrix(scenarios, jobs: int = 1, keep_traces=()):
    """Run scenarios (optionally in parallel); returns name-keyed results.

    Each result is a dict with the metrics, the soundness verdict and,
    for names listed in ``keep_traces``, the full trace.
    """
    keep = set(keep_traces)
    tasks = [(s, s.name in keep) for s in scenarios]
    results = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = pool.map(_run_one, tasks)
            for name, metrics, trace, sound in outcomes:
                results[name] = {"metrics": metrics, "trace": trace, "soundness": sound}
    else:
        for task in tasks:
            name, metrics, trace, sound = _run_one(task)
            results[name] = {"metrics": metrics, "trace": trace, "soundness": sound}
    return results


def _check(checks, check_id, description, ok, detail):
    checks.append(
        {"id": check_id, "description": description,
         "status": "pass" if ok else "fail", "detail": detail}
    )
    return ok


def _info(checks, check_id, description, status, detail):
    checks.append({"id": check_id, "description": description, "status": status, "detail": detail})


def _steady(results, *key):
    entry = results.get(scenario_key(*key))
    return None if entry is None else entry["metrics"].steady_min_gap


def evaluate_trends(results) -> list[dict]:
    """Ordering and safety verdicts over a result set.

    Hard checks mirror the qualitative claims: no collision anywhere, the
    dead-reckoning bracket holds for every async run, steady gaps shrink for
    slower lead oscillation and for finer ladders, and the gap-only sensing
    mode keeps larger gaps than the mode crediting the lead's braking.
    """
    checks: list[dict] = []

    collided = sorted(n for n, r in results.items() if r["metrics"].collision)
    _check(checks, "safety.no_collision", "ground-truth gap stays positive in every run",
           not collided, {"collided": collided})

    unsound = sorted(
        n for n, r in results.items() if r["soundness"] is not None and not r["soundness"]
    )
    _check(checks, "safety.estimate_bracket",
           "async estimate stays within [remaining, remaining + horizon] while cruising",
           not unsound, {"violations": unsound})

    emergencies = sorted(n for n, r in results.items() if r["metrics"].emergency_braking)
    _info(checks, "safety.emergency_braking", "runs that fell back to emergency braking",
          "info", {"runs": emergencies})

    for controller, hard in ((SYNC, True), (ASYNC, False)):
        slow = _steady(results, controller, 1, 30.0, 8, 0.02)
        fast = _steady(results, controller, 1, 10.0, 8, 0.02)
        if slow is None or fast is None:
            continue
        ok = slow < fast
        detail = {"steady_min_gap_tf30": slow, "steady_min_gap_tf10": fast}
        check_id = f"trend.lead_period.{controller}"
        description = f"{controller}: steady min gap shrinks when the lead period grows (30 s vs 10 s)"
        if hard:
            _check(checks, check_id, description, ok, detail)
        else:
            _info(checks, check_id, description, "pass" if ok else "warn", detail)

    for controller, hard in ((SYNC, True), (ASYNC, False)):
        fine = _steady(results, controller, 1, 20.0, 8, 0.02)
        coarse = _steady(results, controller, 1, 20.0, 2, 0.02)
        if fine is None or coarse is None:
            continue
        ok = fine < coarse
        detail = {"steady_min_gap_n8": fine, "steady_min_gap_n2": coarse}
        check_id = f"trend.ladder_size.{controller}"
        description = f"{controller}: steady min gap shrinks with more speed levels (8 vs 2)"
        if hard:
            _check(checks, check_id, description, ok, detail)
        else:
            _info(checks, check_id, description, "pass" if ok else "warn", detail)

    pair_failures = []
    pairs_seen = 0
    for controller, hard in ((SYNC, True), (ASYNC, False)):
        failures = []
        for lead_period in LEAD_PERIODS:
            for num_levels in LEVEL_COUNTS:
                for sensing_period in SAFETY_SENSING_PERIODS:
                    wide = _steady(results, controller, 1, lead_period, num_levels, sensing_period)
                    tight = _steady(results, controller, 2, lead_period, num_levels, sensing_period)
                    if wide is None or tight is None:
                        continue
                    pairs_seen += 1
                    if not tight <= wide:
                        failures.append(
                            {"key": scenario_key(controller, 1, lead_period, num_levels,
                                                 sensing_period),
                             "setting1": wide, "setting2": tight}
                        )
        check_id = f"trend.lead_braking_credit.{controller}"
        description = (
            f"{controller}: crediting the lead's braking distance never widens the steady min gap"
        )
        if hard:
            _check(checks, check_id, description, not failures, {"failures": failures})
        else:
            _info(checks, check_id, description, "pass" if not failures else "warn",
                  {"failures": failures})
        pair_failures.extend(failures)

    band = {}
    within_band = True
    for key, published in PUBLISHED_STEADY_MIN_GAP.items():
        local = _steady(results, *key)
        if local is None:
            continue
        relative = (local - published) / published
        inside = abs(relative) <= QUANT_BAND
        within_band = within_band and inside
        band[scenario_key(*key)] = {
            "published": published, "local": local,
            "relative_error": relative, "within_band": inside,
        }
    _info(checks, "quant.published_band",
          f"sync steady min gaps within +-{QUANT_BAND:.0%} of the published values "
          "(informative: vehicle dynamics differ)",
          "pass" if within_band else "warn", band)

    return checks


def _report_markdown(checks, results) -> str:
    lines = ["# Reference evaluation report", "", "## Checks", ""]
    for check in checks:
        status = check["status"].upper()
        lines.append(f"- **{status}** `{check['id']}`: {check['description']}")
    lines += ["", "## Runs", "", "| run | min gap (m) | steady min gap (m) | max speed (m/s) "
              "| collision | emergency |", "|---|---|---|---|---|---|"]
    for name in sorted(results):
        m = results[name]["metrics"]
        lines.append(
            f"| {name} | {m.min_gap:.2f} | {m.steady_min_gap:.2f} | {m.max_speed:.2f} "
            f"| {m.collision} | {m.emergency_braking} |"
        )
    lines.append("")
    return "\n".join(lines)


FIGURE_GROUPS = (
    ("lead-period", "Lead speed period sweep (setting 1, n=8, T=0.02 s)",
     [(1, 10.0, 8, 0.02), (1, 30.0, 8, 0.02)]),
    ("ladder-size", "Ladder granularity sweep (setting 1, Tf=20 s, T=0.02 s)",
     [(1, 20.0, 2, 0.02), (1, 20.0, 4, 0.02), (1, 20.0, 6, 0.02), (1, 20.0, 8, 0.02)]),
    ("sensing-period", "Sensing period sweep (setting 1, Tf=20 s, n=8)",
     [(1, 20.0, 8, 0.1), (1, 20.0, 8, 10.0)]),
    ("lead-braking-credit", "Sensing modes compared (Tf=30 s, n=8, T=0.02 s)",
     [(1, 30.0, 8, 0.02), (2, 30.0, 8, 0.02)]),
)


def reproduce(out_dir, *, quick: bool = False, jobs: int = 1, seed: int = 0,
              plots: bool = True) -> tuple[dict, int]:
    """Run the reference suite, write report + summary + traces + figures.

    Returns (report, exit_code); the exit code is nonzero when any hard
    check fails. ``quick`` restricts the grid to the runs the hard checks
    need, keeping full durations.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenarios = experiment_matrix(seed=seed, quick=quick)
    available = {s.name for s in scenarios}

    figure_names = set()
    for controller in (SYNC, ASYNC):
        for _, _, keys in FIGURE_GROUPS:
            for setting, lead_period, num_levels, sensing_period in keys:
                figure_names.add(
                    scenario_key(controller, setting, lead_period, num_levels, sensing_period)
                )
    keep = sorted(figure_names & available) if plots else []

    results = run_matrix(scenarios, jobs=jobs, keep_traces=keep)
    checks = evaluate_trends(results)

    summary_path = out / "summary.csv"
    with open(summary_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["run", "min_gap", "steady_min_gap", "steady_max_gap", "max_speed",
             "total_distance", "mean_speed", "collision", "emergency_braking", "soundness"]
        )
        for name in sorted(results):
            entry = results[name]
            m = entry["metrics"]
            writer.writerow(
                [name, m.min_gap, m.steady_min_gap, m.steady_max_gap, m.max_speed,
                 m.total_distance, m.mean_speed, m.collision, m.emergency_braking,
                 entry["soundness"]]
            )

    traces_dir = out / "traces"
    if keep:
        traces_dir.mkdir(exist_ok=True)
        for name in keep:
            trace = results[name]["trace"]
            if trace is not None:
                write_trace(trace, traces_dir / f"{name}.csv")

    figures = []
    if plots and keep:
        from . import plots as plotting

        fig_dir = out / "figures"
        fig_dir.mkdir(exist_ok=True)
        for controller in (SYNC, ASYNC):
            for group_id, title, keys in FIGURE_GROUPS:
                traces = []
                labels = []
                for setting, lead_period, num_levels, sensing_period in keys:
                    name = scenario_key(controller, setting, lead_period, num_levels,
                                        sensing_period)
                    entry = results.get(name)
                    if entry and entry["trace"] is not None:
                        traces.append(entry["trace"])
                        labels.append(name)
                if len(traces) >= 2:
                    path = fig_dir / f"{controller}-{group_id}.png"
                    plotting.plot_comparison(traces, labels, f"{controller}: {title}", path)
                    figures.append(str(path))

    hard_failures = [c["id"] for c in checks if c["status"] == "fail"]
    report = {
        "runs": {name: results[name]["metrics"].to_dict() for name in sorted(results)},
        "soundness": {name: results[name]["soundness"] for name in sorted(results)},
        "checks": checks,
        "figures": figures,
        "hard_failures": hard_failures,
    }
    with open(out / "report.json", "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2, sort_keys=True)
        handle.write("\n")
    results_for_md = {name: results[name] for name in sorted(results)}
    with open(out / "report.md", "w", encoding="utf-8") as handle:
        handle.write(_report_markdown(checks, results_for_md))

    return report, (1 if hard_failures else 0)
