"""Magnus truncation error against a tight ODE oracle, first and second order.

The error of the order-N solution should shrink like lam^(N+1), so each
halving of lam divides it by about 2^(N+1).
"""

import argparse
import os

from cartanlab.models import AnharmonicOscillator
from cartanlab.report import write_csv


def scan(lams, orders, Q, P, t, m=1.0, omega=1.0):
    osc = AnharmonicOscillator(m, omega, lams[0])
    sols = {N: osc.magnus(N) for N in orders}
    rows = []
    for lam in lams:
        q_ref, p_ref = osc.oracle(Q, P, t, lam=lam)
        row = [lam]
        for N in orders:
            s = sols[N]
            row += [abs(s.q_sm.evaluate(Q, P, t, m, omega, lam) - q_ref),
                    abs(s.p_sm.evaluate(Q, P, t, m, omega, lam) - p_ref)]
        rows.append(row)
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=4e-2, help="largest coupling")
    ap.add_argument("--halvings", type=int, default=5)
    ap.add_argument("--orders", default="1,2")
    ap.add_argument("--Q", type=float, default=1.0)
    ap.add_argument("--P", type=float, default=0.5)
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--out", default="cartanlab_runs")
    a = ap.parse_args()
    orders = [int(s) for s in a.orders.split(",")]
    lams = [a.lam / 2**k for k in range(a.halvings + 1)]
    rows = scan(lams, orders, a.Q, a.P, a.t)
    header = ["lambda"] + [f"{c}_err_order{N}" for N in orders for c in ("q", "p")]
    path = write_csv(os.path.join(a.out, "magnus_convergence.csv"), header, rows,
                     f"Q={a.Q} P={a.P} t={a.t}")
    print(" ".join(f"{h:>16}" for h in header))
    for i, r in enumerate(rows):
        line = " ".join(f"{v:16.6e}" for v in r)
        if i:
            line += "   ratios " + " ".join(f"{rows[i - 1][j] / r[j]:6.3f}" for j in range(1, len(r)))
        print(line)
    print(f"wrote {path}")
