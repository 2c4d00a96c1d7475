"""Command-line entry point: run scenarios, sweep parameters, replay reports.

Exit codes: 0 ok, 2 configuration error, 3 I/O error, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .bandit import POLICIES
from .metrics import summarize
from .scenario import (
    PRESET_NAMES,
    AvailabilityWindow,
    ConfigError,
    GatewayConfig,
    ScenarioConfig,
    apply_chsf_setting,
    builtin,
    config_from_dict,
    load_config,
)
from .simcore import run_simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INTERNAL = 4

CSV_HEADER = ("axis_value", "policy", "seed", "attempts", "successes", "fsr", "fairness",
              "mean_switch_latency")
SWEEP_AXES = ("devices", "setting", "channels")
THREADS_ENV = "LORA_TOW_SIM_THREADS"


class ReplayMismatch(RuntimeError):
    pass


@dataclass
class Row:
    axis_value: str
    policy: str
    seed: int
    attempts: int
    successes: int
    fsr: float | None
    fairness: float | None
    mean_switch_latency: float | None
    received_per_channel: dict[int, int] = field(default_factory=dict)
    received_per_pair: dict[tuple[int, int], int] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "axis_value": self.axis_value,
            "policy": self.policy,
            "seed": self.seed,
            "attempts": self.attempts,
            "successes": self.successes,
            "fsr": _round(self.fsr),
            "fairness": _round(self.fairness),
            "mean_switch_latency": _round(self.mean_switch_latency),
            "received_per_channel": {str(k): v for k, v in sorted(self.received_per_channel.items())},
            "received_per_pair": {f"{c}:{s}": v for (c, s), v in sorted(self.received_per_pair.items())},
        }


@dataclass
class Job:
    axis_value: str
    cfg: ScenarioConfig


@dataclass
class Report:
    command: str
    scenario: str
    axis: str | None
    master_seed: int
    seeds: list[int]
    jobs: list[Job]
    rows: list[Row]

    def aggregates(self) -> list[dict[str, Any]]:
        out = []
        for job in self.jobs:
            rows = [r for r in self.rows
                    if r.axis_value == job.axis_value and r.policy == job.cfg.policy.name]
            entry: dict[str, Any] = {"axis_value": job.axis_value, "policy": job.cfg.policy.name}
            for metric in ("fsr", "fairness", "mean_switch_latency"):
                s = summarize(getattr(r, metric) for r in rows)
                entry[metric] = {k: (_round(v) if k != "n" else v) for k, v in s.as_dict().items()}
            out.append(entry)
        return out


def _round(x: float | None) -> float | None:
    return None if x is None else round(x, 6)


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def _axis_key(value: str) -> tuple:
    parts = value.replace(",", " ").split()
    try:
        return (0, tuple(float(p) for p in parts))
    except ValueError:
        return (1, value)


# -- execution ---------------------------------------------------------------

def _run_one(args: tuple[ScenarioConfig, str, int, int, bool]) -> tuple[Row, str | None]:
    cfg, axis_value, master, trial, want_log = args
    buf = io.StringIO() if want_log else None
    rec = run_simulation(cfg, seed=master, trial=trial, event_log=buf)
    row = Row(axis_value, cfg.policy.name, trial, rec.attempts, rec.successes, rec.fsr,
              rec.fairness, rec.mean_switch_latency, dict(rec.received_per_channel),
              dict(rec.received_per_pair))
    return row, (buf.getvalue() if buf is not None else None)


def worker_count() -> int:
    cpus = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return cpus
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer",
                          [f"{THREADS_ENV}: got {raw!r}"]) from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer", [f"{THREADS_ENV}: got {n}"])
    return min(n, cpus)


def execute(jobs: Sequence[Job], seeds: Sequence[int], master_seed: int,
            event_log: io.TextIOBase | None = None, workers: int | None = None) -> list[Row]:
    """Run every (job, seed) pair; result order never depends on ``workers``."""
    tasks = [(j.cfg, j.axis_value, master_seed, s, event_log is not None) for j in jobs for s in seeds]
    n = workers if workers is not None else worker_count()
    if n <= 1 or len(tasks) <= 1:
        results = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(n, len(tasks))) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=1))
    if event_log is not None:
        for (row, text) in results:
            for line in (text or "").splitlines():
                rec = json.loads(line)
                event_log.write(json.dumps(
                    {"axis_value": row.axis_value, "policy": row.policy, "seed": row.seed, **rec}) + "\n")
    rows = [r for r, _ in results]
    rows.sort(key=lambda r: (_axis_key(r.axis_value), r.policy, r.seed))
    return rows


# -- report emission -----------------------------------------------------------

def emit_csv(rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.axis_value, r.policy, r.seed, r.attempts, r.successes,
                    _fmt(r.fsr), _fmt(r.fairness), _fmt(r.mean_switch_latency)])
    return buf.getvalue()


def emit_json(report: Report) -> str:
    body = {
        "tool": "lora-tow",
        "version": __version__,
        "command": report.command,
        "scenario": report.scenario,
        "axis": report.axis,
        "master_seed": report.master_seed,
        "seeds": list(report.seeds),
        "configs": [
            {"axis_value": j.axis_value, "policy": j.cfg.policy.name, "digest": j.cfg.digest(),
             "config": j.cfg.to_dict()}
            for j in report.jobs
        ],
        "rows": [r.as_dict() for r in report.rows],
        "aggregate": report.aggregates(),
    }
    return json.dumps(body, indent=2) + "\n"


def emit_report(report: Report, fmt: str) -> str:
    if not report.rows:
        raise ValueError("a report needs at least one row")
    if fmt == "csv":
        return emit_csv(report.rows)
    if fmt == "json":
        return emit_json(report)
    raise ConfigError(f"unknown format {fmt!r}", [f"format: expected csv or json, got {fmt!r}"])


# -- scenario resolution ---------------------------------------------------------

def resolve_scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise OSError(f"config file not found: {path}")
        cfg = load_config(path)
    else:
        cfg = builtin(args.builtin)
    if getattr(args, "devices", None) is not None:
        cfg = cfg.with_devices(args.devices)
    return cfg


def _check(cfg: ScenarioConfig) -> ScenarioConfig:
    # round-trip through the validator so overrides get the same checks as files
    return config_from_dict(cfg.to_dict())


def apply_axis(cfg: ScenarioConfig, axis: str, value: str) -> ScenarioConfig:
    if axis == "devices":
        try:
            n = int(value)
        except ValueError:
            raise ConfigError(f"bad device count {value!r}", [f"values: {value!r} is not an integer"]) from None
        return cfg.with_devices(n)
    if axis == "setting":
        try:
            s = int(value)
        except ValueError:
            raise ConfigError(f"bad setting {value!r}", [f"values: {value!r} is not an integer"]) from None
        return apply_chsf_setting(cfg, s)
    if axis == "channels":
        try:
            chans = tuple(int(c) for c in value.split(",") if c.strip())
        except ValueError:
            raise ConfigError(f"bad channel set {value!r}",
                              [f"values: {value!r} is not a comma-separated channel list"]) from None
        devices = dataclasses.replace(cfg.devices, channels=chans)
        windows = tuple(AvailabilityWindow(w.from_min, w.to_min, chans) for w in cfg.gateway.availability)
        return cfg.replace(devices=devices, gateway=GatewayConfig(availability=windows))
    raise ConfigError(f"unknown sweep axis {axis!r}", [f"axis: expected one of {', '.join(SWEEP_AXES)}"])


def _seed_list(args: argparse.Namespace, cfg: ScenarioConfig) -> list[int]:
    n = args.seeds if args.seeds is not None else cfg.trials
    if n < 1:
        raise ConfigError("--seeds must be >= 1", [f"seeds: got {n}"])
    return list(range(n))


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    Path(out).write_text(text)


def _summary_lines(report: Report) -> list[str]:
    lines = []
    for agg in report.aggregates():
        f, fa = agg["fsr"], agg["fairness"]
        label = f"{agg['axis_value']} " if report.axis else ""
        lines.append(
            f"{label}{agg['policy']}: fsr mean={_fmt(f['mean'])} ci95={_fmt(f['ci95'])} "
            f"fairness mean={_fmt(fa['mean'])} (n={f['n']})"
        )
    return lines


def _finish(report: Report, args: argparse.Namespace) -> None:
    text = emit_report(report, args.format)
    _write(text, args.out)
    # keep stdout clean for the report when it goes there
    stream = sys.stderr if args.out in (None, "-") else sys.stdout
    for line in _summary_lines(report):
        print(line, file=stream)


def _open_log(path: str | None):
    return open(path, "w") if path else None


# -- commands ---------------------------------------------------------------

def cmd_run(args: argparse.Namespace) -> Report:
    cfg = resolve_scenario(args)
    if args.policy is not None:
        cfg = cfg.with_policy(args.policy)
    cfg = _check(cfg)
    seeds = _seed_list(args, cfg)
    jobs = [Job(cfg.name, cfg)]
    log = _open_log(args.event_log)
    try:
        rows = execute(jobs, seeds, args.master_seed, event_log=log)
    finally:
        if log is not None:
            log.close()
    report = Report("run", cfg.name, None, args.master_seed, seeds, jobs, rows)
    _finish(report, args)
    return report


def cmd_sweep(args: argparse.Namespace) -> Report:
    base = resolve_scenario(args)
    if not args.values:
        raise ConfigError("sweep needs at least one value", ["values: empty list"])
    policies = args.policies or list(POLICIES)
    jobs = []
    for value in args.values:
        cfg = apply_axis(base, args.axis, value)
        for p in policies:
            jobs.append(Job(value, _check(cfg.with_policy(p))))
    seeds = _seed_list(args, base)
    log = _open_log(args.event_log)
    try:
        rows = execute(jobs, seeds, args.master_seed, event_log=log)
    finally:
        if log is not None:
            log.close()
    report = Report("sweep", base.name, args.axis, args.master_seed, seeds, jobs, rows)
    _finish(report, args)
    return report


def cmd_presets(args: argparse.Namespace) -> None:
    if args.export:
        _write(builtin(args.export).to_yaml(), args.out)
        return
    for name in PRESET_NAMES:
        print(name)


def replay(body: dict[str, Any]) -> list[Row]:
    """Re-run every configuration embedded in a JSON report."""
    jobs = [Job(c["axis_value"], config_from_dict(c["config"])) for c in body["configs"]]
    return execute(jobs, body["seeds"], body["master_seed"])


def cmd_replay(args: argparse.Namespace) -> None:
    try:
        body = json.loads(Path(args.report).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"report is not valid JSON: {exc}", [str(exc)]) from None
    rows = replay(body)
    fresh = [r.as_dict() for r in rows]
    if fresh != body["rows"]:
        bad = sum(1 for a, b in zip(fresh, body["rows"]) if a != b) + abs(len(fresh) - len(body["rows"]))
        raise ReplayMismatch(f"{bad} row(s) differ from the stored report")
    print(f"replayed {len(fresh)} rows: identical")


# -- argument parsing -----------------------------------------------------------

def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", metavar="NAME", choices=PRESET_NAMES, help="built-in preset")
    src.add_argument("--config", metavar="PATH", help="YAML scenario file")
    p.add_argument("--devices", type=int, help="override the device count")
    p.add_argument("--seeds", type=int, help="number of trials (default: scenario's trials)")
    p.add_argument("--master-seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", metavar="PATH", help="report path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--event-log", metavar="PATH", help="write per-frame JSON lines here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lora-tow", description="LoRa channel/SF selection simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario over several seeds")
    _add_scenario_args(run)
    run.add_argument("--policy", choices=POLICIES, help="override the scenario's policy")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="sweep one parameter across policies and seeds")
    _add_scenario_args(sweep)
    sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sweep.add_argument("--values", nargs="*", default=[],
                       help="axis values; channel sets are comma-separated, e.g. 2,4,6")
    sweep.add_argument("--policies", nargs="+", choices=POLICIES)
    sweep.set_defaults(func=cmd_sweep)

    presets = sub.add_parser("presets", help="list presets or export one as YAML")
    presets.add_argument("--export", metavar="NAME", choices=PRESET_NAMES)
    presets.add_argument("--out", metavar="PATH")
    presets.set_defaults(func=cmd_presets)

    rep = sub.add_parser("replay", help="re-run a JSON report and compare every row")
    rep.add_argument("report", metavar="REPORT.json")
    rep.set_defaults(func=cmd_replay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - top-level categorisation
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
