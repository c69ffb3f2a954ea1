"""Command-line interface: single runs, parameter sweeps, reference suite.

Exit status is nonzero whenever a run collided or failed to execute, so the
commands compose with shell scripting and CI gates.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .reference import reproduce
from .scenario import (
    Scenario,
    ScenarioError,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .simulate import run_scenario
from .traces import write_metrics, write_trace


def _write_run_outputs(scenario: Scenario, out_dir: Path, plots: bool) -> bool:
    """Run one scenario and persist trace/metrics (+ figure). True if collided."""
    out_dir.mkdir(parents=True, exist_ok=True)
    trace, metrics = run_scenario(scenario)
    write_trace(trace, out_dir / "trace.csv")
    write_metrics(metrics, out_dir / "metrics.json")
    if plots:
        from . import plots as plotting

        plotting.plot_run(trace, scenario.name, out_dir / "run.png")
    return metrics.collision


def _cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError:
        print(f"error: scenario file not found: {args.scenario}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    out_dir = Path(args.out) if args.out else Path(f"{scenario.name}.out")
    collided = _write_run_outputs(scenario, out_dir, args.plots)
    print(f"{scenario.name}: wrote {out_dir}/trace.csv"
          f"{' (collision!)' if collided else ''}")
    return 1 if collided else 0


def _parse_axis(spec: str) -> tuple[str, list]:
    if "=" not in spec:
        raise ValueError(f"axis {spec!r} must look like key=v1,v2,...")
    key, _, raw = spec.partition("=")
    values = []
    for token in raw.split(","):
        try:
            values.append(json.loads(token))
        except json.JSONDecodeError:
            values.append(token)
    if not values:
        raise ValueError(f"axis {spec!r} has no values")
    return key, values


def _set_path(data: dict, dotted: str, value) -> None:
    node = data
    parts = dotted.split(".")
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value


def _axis_token(value) -> str:
    text = json.dumps(value) if not isinstance(value, str) else value
    return "".join(ch if ch.isalnum() or ch in ".-" else "_" for ch in text)


def _sweep_worker(task):
    point_name, data, out_root, plots = task
    try:
        scenario = scenario_from_dict(data)
    except ScenarioError as exc:
        return point_name, None, f"{type(exc).__name__}: {exc}"
    out_dir = Path(out_root) / point_name
    out_dir.mkdir(parents=True, exist_ok=True)
    trace, metrics = run_scenario(scenario)
    write_trace(trace, out_dir / "trace.csv")
    write_metrics(metrics, out_dir / "metrics.json")
    if plots:
        from . import plots as plotting

        plotting.plot_run(trace, point_name, out_dir / "run.png")
    return point_name, metrics, None


def _cmd_sweep(args) -> int:
    try:
        template = load_scenario(args.template)
    except FileNotFoundError:
        print(f"error: template file not found: {args.template}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        template = template.with_seed(args.seed)
    base = scenario_to_dict(template)

    try:
        axes = [_parse_axis(spec) for spec in args.axis]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_root = Path(args.out) if args.out else Path(f"{template.name}.sweep")
    out_root.mkdir(parents=True, exist_ok=True)

    tasks = []
    for combo in itertools.product(*(values for _, values in axes)):
        data = copy.deepcopy(base)
        parts = []
        for (key, _), value in zip(axes, combo):
            # num_levels replaces the explicit level list from the template.
            if key == "num_levels":
                data.pop("levels", None)
            _set_path(data, key, value)
            parts.append(f"{key.replace('.', '-')}={_axis_token(value)}")
        point_name = "__".join(parts)
        data["name"] = f"{template.name}__{point_name}"
        tasks.append((point_name, data, str(out_root), args.plots))

    rows = []
    failed = False
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_sweep_worker, tasks))
    else:
        outcomes = [_sweep_worker(task) for task in tasks]
    for point_name, metrics, error in outcomes:
        if error is not None:
            print(f"{point_name}: error: {error}", file=sys.stderr)
            failed = True
            rows.append({"run": point_name, "error": error})
            continue
        row = {"run": point_name, **metrics.to_dict()}
        rows.append(row)
        if metrics.collision:
            failed = True

    summary_path = out_root / "summary.json"
    with open(summary_path, "w", encoding="utf-8") as handle:
        json.dump(rows, handle, indent=2, sort_keys=True)
        handle.write("\n")
    fields = ["run", "min_gap", "steady_min_gap", "steady_max_gap", "max_speed",
              "total_distance", "mean_speed", "collision", "emergency_braking", "error"]
    with open(out_root / "summary.csv", "w", encoding="utf-8") as handle:
        handle.write(",".join(fields) + "\n")
        for row in rows:
            handle.write(",".join(str(row.get(f, "")) for f in fields) + "\n")
    print(f"sweep: {len(rows)} runs -> {summary_path}")
    return 1 if failed else 0


def _cmd_reproduce(args) -> int:
    out_dir = Path(args.out) if args.out else Path("reference-report")
    report, code = reproduce(
        out_dir,
        quick=args.quick,
        jobs=args.jobs,
        seed=args.seed if args.seed is not None else 0,
        plots=args.plots,
    )
    for check in report["checks"]:
        print(f"[{check['status'].upper():4}] {check['id']}: {check['description']}")
    print(f"report: {out_dir}/report.json")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="headway",
        description="Collision-avoidance speed control: runs, sweeps, reference suite.",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single scenario file")
    p_run.add_argument("scenario", help="path to a scenario JSON file")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--plots", dest="plots", action="store_true", default=True)
    p_run.add_argument("--no-plots", dest="plots", action="store_false")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="grid sweep over scenario fields")
    p_sweep.add_argument("template", help="path to the template scenario JSON file")
    p_sweep.add_argument(
        "--axis", action="append", required=True, metavar="key=v1,v2,...",
        help="sweep axis; dotted keys reach nested fields (repeatable)",
    )
    p_sweep.add_argument("--out", default=None, help="output directory")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel runs")
    p_sweep.add_argument("--plots", dest="plots", action="store_true", default=False)
    p_sweep.add_argument("--no-plots", dest="plots", action="store_false")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_rep = sub.add_parser(
        "reproduce-paper",
        help="run the built-in reference evaluation suite and report trends",
    )
    p_rep.add_argument("--out", default=None, help="output directory")
    p_rep.add_argument("--jobs", type=int, default=1, help="parallel runs")
    p_rep.add_argument("--quick", action="store_true", help="trend-essential subset only")
    p_rep.add_argument("--plots", dest="plots", action="store_true", default=True)
    p_rep.add_argument("--no-plots", dest="plots", action="store_false")
    p_rep.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
