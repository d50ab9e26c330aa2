"""Run every named scenario with default settings and tabulate exit codes.

    python3 scripts/run_scenarios.py [--out DIR] [--jobs N]
"""

import argparse
import os
import time

from cartanlab.cli import main
from cartanlab.scenarios import SCENARIOS


def run(out: str, jobs: int) -> dict:
    codes = {}
    for name in SCENARIOS:
        t0 = time.perf_counter()
        codes[name] = (main([name, "--out", os.path.join(out, name), "--jobs", str(jobs)]),
                       time.perf_counter() - t0)
    return codes


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="cartanlab_runs")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    codes = run(args.out, args.jobs)
    print()
    print(f"{'scenario':<15}{'exit':>5}{'seconds':>10}")
    for name, (code, dt) in codes.items():
        print(f"{name:<15}{code:>5}{dt:>10.1f}")
