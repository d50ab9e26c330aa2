"""Bracket deviations from Heisenberg-Weyl values as the S^3 radius grows.

Besides the raw deviations this prints each family multiplied by R and by
R^2.  A family that decays like 1/R has a flat ``*R`` column; one that
decays like 1/R^2 has a flat ``*R^2`` column.
"""

import argparse
import os

from cartanlab.models.s3 import contraction_scan, loglog_slope
from cartanlab.report import write_csv

FAMILIES = ("eps_th_sym", "eps_th_anti", "rho_th", "th_th", "Z_norm")

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--R", default="4,8,16,32,64,128")
    ap.add_argument("--n-points", type=int, default=12)
    ap.add_argument("--eps-window", type=float, default=0.5)
    ap.add_argument("--theta-window", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="cartanlab_runs")
    a = ap.parse_args()
    Rs = [float(s) for s in a.R.split(",")]
    rows = contraction_scan(Rs, n_points=a.n_points, seed=a.seed, eps_window=a.eps_window,
                            theta_window=a.theta_window)
    header = ["R"] + [f for f in FAMILIES] + [f"{f}*R" for f in FAMILIES] + [f"{f}*R^2" for f in FAMILIES]
    table = [[r["R"]] + [r[f] for f in FAMILIES] + [r[f] * r["R"] for f in FAMILIES]
             + [r[f] * r["R"] ** 2 for f in FAMILIES] for r in rows]
    slopes = {f: loglog_slope(Rs, [r[f] for r in rows]) for f in FAMILIES}
    path = write_csv(os.path.join(a.out, "contraction_scan.csv"), header, table,
                     "slopes " + " ".join(f"{f}={s:.6f}" for f, s in slopes.items()))
    print(f"{'R':>6} " + " ".join(f"{f:>12}" for f in FAMILIES))
    for r in rows:
        print(f"{r['R']:6.0f} " + " ".join(f"{r[f]:12.4e}" for f in FAMILIES))
    print("log-log slopes: " + ", ".join(f"{f} {s:+.4f}" for f, s in slopes.items()))
    print(f"{'R':>6} " + " ".join(f"{f + '*R':>14}" for f in FAMILIES))
    for r in rows:
        print(f"{r['R']:6.0f} " + " ".join(f"{r[f] * r['R']:14.6f}" for f in FAMILIES))
    print(f"wrote {path}")
