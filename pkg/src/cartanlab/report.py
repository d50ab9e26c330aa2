"""Run reports: deterministic JSON and CSV output."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any


def _fmt(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def dumps(obj: Any, indent: int = 1, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, int):
        return str(obj)
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return dumps(obj.item(), indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return dumps(obj.tolist(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Check:
    name: str
    value: Any
    tolerance: Any
    passed: bool | None  # None: informational only
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance,
                "passed": self.passed, "detail": self.detail}


@dataclass
class RunReport:
    scenario: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)  # plot data, written by emit_plot_data

    @property
    def ok(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def as_dict(self) -> dict:
        # timing is kept out so that reports are byte-reproducible
        return {
            "scenario": self.scenario,
            "config": self.config,
            "checks": [c.as_dict() for c in self.checks],
            "residuals": {c.name: c.value for c in self.checks if isinstance(c.value, (int, float))},
            "tables": self.tables,
            "artifacts": sorted(self.artifacts),
            "passed": self.ok,
        }

    def to_json(self) -> str:
        return dumps(self.as_dict()) + "\n"

    def summary_lines(self) -> list[str]:
        out = []
        for c in self.checks:
            tag = {True: "PASS", False: "FAIL", None: "INFO"}[c.passed]
            val = _fmt(c.value) if isinstance(c.value, float) else c.value
            out.append(f"[{tag}] {c.name}: {val} (tol {c.tolerance})")
        return out


def write_csv(path: str, header: list[str], rows, comment: str | None = None) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([format(float(v), ".17g") if isinstance(v, (int, float)) and not isinstance(v, bool) else v
                        for v in r])
    return path


def emit_plot_data(report: RunReport, out_dir: str) -> list[str]:
    """Write each ``report.series[name] = (header, rows, comment)`` to ``<out_dir>/<name>.csv``."""
    series = report.series
    paths = []
    for name in sorted(series):
        header, rows, comment = series[name]
        p = write_csv(os.path.join(out_dir, f"{name}.csv"), header, rows, comment)
        paths.append(os.path.basename(p))
    report.artifacts.extend(paths)
    return paths
