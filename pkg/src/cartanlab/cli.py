"""Command line entry point: ``cartanlab <scenario> [options]``.

Configuration precedence is flags > config file > defaults.  The config
file is a JSON object with the keys of :class:`ScenarioConfig`; scenario
parameters go under ``"params"``.  Unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields

from .flows import StepFailure
from .geometry import ChartError
from .report import RunReport, dumps, emit_plot_data
from .scenarios import SCENARIOS, ConfigError, run_tasks


# Scenario parameters and their defaults.  Keys outside these tables are errors.
DEFAULT_PARAMS: dict[str, dict] = {
    "relativistic": {"m": 1.0, "c": 1.0, "n_points": 40},
    "anharmonic": {"m": 1.0, "omega": 1.0, "lambda": 1e-3, "n": 4, "halving": 3, "Q": 1.0, "P": 0.5,
                   "t": 2.0, "ratio_window": [3.5, 4.5]},
    "s3": {"R": 2.0, "n_points": 24, "n_lift_points": 6, "R_values": [4.0, 8.0, 16.0, 32.0, 64.0],
           "slope_window": [-2.2, -1.8]},
    "bracket-table": {"model": "relativistic", "model_params": {}, "observables": ["Pi", "XX", "Hn"],
                      "basis": [], "n_points": 40},
    "lift": {"model": "relativistic", "model_params": {}, "observable": "Q", "n_points": 12, "n_lift_points": 6},
}

FORMATS = ("json", "csv")

# the structure-constant fits need more samples than basis functions
MIN_POINTS = {"relativistic": 8, "s3": 12, "bracket-table": 4, "lift": 1}


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    tol: float | None = None  # overrides every scenario tolerance when set
    out: str = "cartanlab_out"
    format: list = field(default_factory=lambda: ["json", "csv"])
    jobs: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        allowed = DEFAULT_PARAMS[self.scenario]
        bad = sorted(set(self.params) - set(allowed))
        if bad:
            raise ConfigError(f"unknown parameter(s) for {self.scenario}: {bad}")
        merged = {k: v for k, v in allowed.items()}
        merged.update(self.params)
        self.params = merged
        if isinstance(self.format, str):
            self.format = [f for f in self.format.split(",") if f]
        unknown = [f for f in self.format if f not in FORMATS]
        if unknown:
            raise ConfigError(f"unknown output format(s) {unknown}; choose from {list(FORMATS)}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")
        p = self.params
        if "n_points" in p and int(p["n_points"]) < MIN_POINTS[self.scenario]:
            raise ConfigError(f"n_points must be >= {MIN_POINTS[self.scenario]} for {self.scenario}")
        if "n_lift_points" in p and int(p["n_lift_points"]) < 1:
            raise ConfigError("n_lift_points must be >= 1")
        if self.scenario == "s3":
            if p["R"] <= 0 or len(p["R_values"]) < 2 or min(p["R_values"]) <= 0:
                raise ConfigError("need R > 0 and at least two positive R_values")
            if len(p["slope_window"]) != 2:
                raise ConfigError("slope_window must be [low, high]")
        if self.scenario == "anharmonic":
            if p["lambda"] < 0:
                raise ConfigError("lambda must be non-negative")
            if int(p["halving"]) < 1:
                raise ConfigError("halving must be >= 1")
            p["halving"] = int(p["halving"])
            p["n"] = int(p["n"])

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        names = {f.name for f in fields(cls)}
        bad = sorted(set(d) - names)
        if bad:
            raise ConfigError(f"unknown config key(s): {bad}")
        return cls(**d)

    def task_params(self) -> dict:
        return {**self.params, "seed": self.seed, "tol": self.tol}

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")  # the output location does not change results
        d.pop("jobs")
        return d


def run_scenario(cfg: ScenarioConfig) -> RunReport:
    report = RunReport(cfg.scenario, cfg.echo())
    t0 = time.perf_counter()
    parts = run_tasks(SCENARIOS[cfg.scenario], cfg.task_params(), cfg.jobs)
    report.timing["run_seconds"] = time.perf_counter() - t0
    for part in parts:
        report.checks.extend(part.checks)
        report.tables.update(part.tables)
        report.series.update(part.series)
    return report


def write_outputs(report: RunReport, cfg: ScenarioConfig, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    if "csv" in cfg.format:
        emit_plot_data(report, out_dir)
    if "json" in cfg.format:
        report.artifacts.append("report.json")
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(report.to_json())
        with open(os.path.join(out_dir, "timing.json"), "w") as fh:
            fh.write(dumps(report.timing) + "\n")


def _parse(argv):
    ap = argparse.ArgumentParser(prog="cartanlab", description="Run a named verification scenario.")
    ap.add_argument("scenario", choices=sorted(SCENARIOS))
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--tol", type=float, help="override every check tolerance")
    ap.add_argument("--out", help="output directory (CARTANLAB_OUT takes precedence)")
    ap.add_argument("--format", help="comma separated subset of json,csv")
    ap.add_argument("--jobs", type=int)
    g = ap.add_argument_group("scenario parameters")
    g.add_argument("--lambda", dest="lam", type=float, help="anharmonic coupling")
    g.add_argument("--halving", type=int, help="number of lambda halvings")
    g.add_argument("--R", type=float, help="S^3 radius")
    g.add_argument("--model", help="model for bracket-table / lift")
    g.add_argument("--observable", help="observable to lift")
    g.add_argument("--observables", help="comma separated observables for bracket-table")
    g.add_argument("--param", action="append", default=[], metavar="KEY=JSON",
                   help="set any scenario parameter, e.g. --param n_points=10")
    return ap.parse_args(argv)


def build_config(args) -> ScenarioConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        if data.get("scenario", args.scenario) != args.scenario:
            raise ConfigError(f"config is for scenario {data['scenario']!r}, not {args.scenario!r}")
    data["scenario"] = args.scenario
    params = dict(data.get("params") or {})
    for key, attr in (("lambda", "lam"), ("halving", "halving"), ("R", "R"), ("model", "model"),
                      ("observable", "observable")):
        v = getattr(args, attr)
        if v is not None:
            params[key] = v
    if args.observables is not None:
        params["observables"] = [s for s in args.observables.split(",") if s]
    for item in args.param:
        k, sep, v = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            params[k] = json.loads(v)
        except json.JSONDecodeError:
            params[k] = v
    data["params"] = params
    for key in ("seed", "tol", "out", "format", "jobs"):
        v = getattr(args, key)
        if v is not None:
            data[key] = v
    return ScenarioConfig.from_dict(data)


def main(argv=None) -> int:
    try:
        args = _parse(argv)
    except SystemExit as e:  # argparse usage errors count as config errors
        return 2 if e.code else 0
    try:
        cfg = build_config(args)
    except (ConfigError, TypeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    out_dir = os.environ.get("CARTANLAB_OUT") or cfg.out
    try:
        report = run_scenario(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (StepFailure, ChartError) as e:
        print(f"{cfg.scenario}: run aborted: {e}", file=sys.stderr)
        return 1
    write_outputs(report, cfg, out_dir)
    for line in report.summary_lines():
        print(line)
    status = "all checks passed" if report.ok else "some checks failed"
    print(f"{cfg.scenario}: {status}; report in {out_dir}")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
