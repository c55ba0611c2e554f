"""``risray`` command line: power maps, setting sweeps, schedule runs, comparisons."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace
from pathlib import Path
from typing import Optional, Sequence

from . import control
from .config import POLICIES, ConfigError, ScenarioConfig, dump_scenario, load_scenario
from .metrics import compare_traces, metrics_report, report_json
from .propagation import power_map
from .simulation import SimulationTrace, probe_reports, run_simulation


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from None


def resolve_angle(cfg: ScenarioConfig, angle: float) -> int:
    """Index of the angle-set member equal to ``angle`` (to 1e-9 deg)."""
    for i, a in enumerate(cfg.scene.ris.angle_set_deg):
        if abs(a - angle) <= 1e-9:
            return i
    raise ValueError(f"unknown RIS setting: angle {angle:g} deg is not in the angle set")


def build_schedule(cfg: ScenarioConfig, policy: str, dwell: int, intervals: int, workers: int = 1):
    scene = cfg.scene
    n = scene.ris.setting_count
    if policy == "static":
        return control.static_schedule(scene.ris.index_of(0.0), dwell, intervals, n)
    if policy == "sweep":
        return control.sweep_schedule(n, dwell, intervals)
    report = probe_reports(scene, cfg.propagation, workers)
    objectives = [control.Objective.for_receiver(scene.receiver(i)) for i in cfg.objective_ids()]
    return control.context_schedule(report, objectives, n, dwell, intervals)


def cmd_map(cfg: ScenarioConfig, args) -> int:
    scene = cfg.scene
    if args.baseline:
        walls = scene.baseline_walls()
    else:
        if args.angle is None:
            raise ValueError("map needs --angle <deg> or --baseline")
        walls = scene.walls_for_setting(resolve_angle(cfg, args.angle))
    res = args.resolution if args.resolution is not None else cfg.simulation.resolution
    pm = power_map(scene.tx, walls, scene.bounds, res, cfg.propagation, workers=args.workers)
    _emit(pm.to_csv(), args.out)
    return 0


def cmd_sweep(cfg: ScenarioConfig, args) -> int:
    report = probe_reports(cfg.scene, cfg.propagation, args.workers)
    lines = [",".join(("setting_index", "angle_deg") + report.receiver_ids)]
    for i, angle in enumerate(cfg.scene.ris.angle_set_deg):
        vals = ",".join(f"{v:.6f}" for v in report.powers_dbm[i])
        lines.append(f"{i},{angle:.6f},{vals}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_run(cfg: ScenarioConfig, args) -> int:
    sim = cfg.simulation
    policy = args.policy or sim.policy
    dwell = args.dwell if args.dwell is not None else sim.dwell
    intervals = args.intervals if args.intervals is not None else sim.intervals
    if args.objectives:
        ids = tuple(s.strip() for s in args.objectives.split(",") if s.strip())
        for i in ids:
            cfg.scene.receiver(i)
        cfg = replace(cfg, simulation=replace(sim, objectives=ids))
    scene = cfg.scene
    schedule = build_schedule(cfg, policy, dwell, intervals, args.workers)
    trace = run_simulation(scene, schedule, cfg.propagation, args.workers)
    baseline_schedule = control.static_schedule(scene.ris.index_of(0.0), dwell, intervals, scene.ris.setting_count)
    baseline = run_simulation(scene, baseline_schedule, cfg.propagation, args.workers)
    probe = control.probe_steps(policy, scene.ris.setting_count, dwell)
    _emit(trace.to_csv(), args.out)
    records = metrics_report(scene, trace, probe, baseline)
    doc = report_json(
        records,
        policy=policy,
        steps=trace.steps,
        dwell=dwell,
        intervals=intervals,
        probe_steps=probe,
        objectives=list(cfg.objective_ids()) if policy == "context" else [],
    )
    if args.metrics:
        _emit(doc, args.metrics)
    for r in records:
        print(
            f"{r.receiver} ({r.role}): satisfied {r.satisfaction_fraction:.2%} of steps, "
            f"{r.satisfaction_fraction_post_probe:.2%} after probing",
            file=sys.stderr,
        )
    return 0


def cmd_compare(cfg: ScenarioConfig, args) -> int:
    base = SimulationTrace.from_csv(_read(args.baseline_trace))
    other = SimulationTrace.from_csv(_read(args.trace))
    ids = [i for i in base.receiver_ids if i in other.receiver_ids]
    if args.receiver:
        if args.receiver not in ids:
            raise ValueError(f"unknown receiver id: {args.receiver}")
        ids = [args.receiver]
    out = []
    for rid in ids:
        d = compare_traces(base, other, rid, args.skip)
        out.append(
            {
                "receiver": rid,
                "deltas": {k: float(f"{v:.6f}") for k, v in asdict(d).items()},
            }
        )
    _emit(json.dumps({"skip_steps": args.skip, "receivers": out}, indent=2) + "\n", args.out)
    return 0


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="scenario file (defaults to the reference room)")
    parser.add_argument(
        "--dump-config",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="print the fully resolved scenario and exit",
    )
    parser.add_argument("--workers", type=int, default=argparse.SUPPRESS if suppress else 1)


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="risray", description=__doc__)
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="command")

    m = sub.add_parser("map", help="received power map CSV for one RIS setting")
    _common(m, suppress=True)
    g = m.add_mutually_exclusive_group()
    g.add_argument("--angle", type=float, help="RIS angle in degrees (must be in the angle set)")
    g.add_argument("--baseline", action="store_true", help="panel at rest, acting as a plain wall")
    m.add_argument("--resolution", type=float)
    m.add_argument("--out")

    s = sub.add_parser("sweep", help="receiver powers for every RIS setting")
    _common(s, suppress=True)
    s.add_argument("--out")

    r = sub.add_parser("run", help="time-stepped run under a control policy")
    _common(r, suppress=True)
    r.add_argument("--policy", choices=POLICIES)
    r.add_argument("--dwell", type=int)
    r.add_argument("--intervals", type=int)
    r.add_argument("--objectives", help="comma-separated receiver ids for the context policy")
    r.add_argument("--out", help="trace CSV (stdout if omitted)")
    r.add_argument("--metrics", help="metrics JSON path")

    c = sub.add_parser("compare", help="dB statistic deltas between two trace CSVs")
    _common(c, suppress=True)
    c.add_argument("baseline_trace")
    c.add_argument("trace")
    c.add_argument("--receiver")
    c.add_argument("--skip", type=int, default=0, help="ignore the first N steps of each trace")
    c.add_argument("--out")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_scenario(args.config) if args.config else ScenarioConfig()
        if args.dump_config:
            sys.stdout.write(dump_scenario(cfg))
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 2
        if args.workers < 1:
            raise ValueError("--workers must be >= 1")
        handler = {"map": cmd_map, "sweep": cmd_sweep, "run": cmd_run, "compare": cmd_compare}
        return handler[args.command](cfg, args)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"risray: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
