"""Time integration, Hamilton-Jacobi maps, variational Jacobians and lifts.

The Hamilton-Jacobi (HJ) map sends initial data ``y`` on the solution
manifold and a time ``s`` to the evolution-manifold point ``(s, q, p)``
reached by the flow.  Models may register a closed form; otherwise the flow
is integrated numerically.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import autodiff as ad
from .geometry import Chart, ChartError, VectorField


class StepFailure(RuntimeError):
    """Integration aborted: step budget exhausted or the chart was left."""

    def __init__(self, msg: str, s: float | None = None):
        super().__init__(msg)
        self.s = s


@dataclass(frozen=True)
class FlowSpec:
    method: str = "dp54"  # "dp54" (Dormand-Prince 5(4)) or "rk4"
    atol: float = 1e-10
    rtol: float = 1e-10
    max_step: float = math.inf
    max_steps: int = 200_000
    rk4_step: float = 1e-3

    def __post_init__(self):
        if self.atol <= 0 or self.rtol <= 0:
            raise ValueError("tolerances must be positive")
        if self.method not in ("dp54", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _as_rhs(field) -> tuple[Callable[[np.ndarray], np.ndarray], Chart | None]:
    if isinstance(field, VectorField):
        return (lambda x: field(x)), field.chart
    return (lambda x: np.asarray(field(x), dtype=float)), None


def _dp_step(f, x, h):
    k = []
    for i in range(7):
        xi = x + h * sum((a * kj for a, kj in zip(_A[i], k)), np.zeros_like(x))
        k.append(f(xi))
    K = np.array(k)
    x5 = x + h * (_B5 @ K)
    err = h * ((_B5 - _B4) @ K)
    return x5, err


def _rk4_step(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(field, x0, s: float, spec: FlowSpec = FlowSpec(), sample_times: Sequence[float] | None = None):
    """Flow ``x0`` along ``field`` for parameter length ``s`` (may be negative).

    ``field`` is a :class:`VectorField` or a plain ``x -> dx/ds`` callable.
    With ``sample_times`` (offsets in ``[0, s]``, monotone) returns
    ``(x_final, samples)``; otherwise just ``x_final``.
    """
    f, chart = _as_rhs(field)
    x = np.array(x0, dtype=float)
    if chart is not None:
        chart.check(x)
    targets = sorted(set(float(t) for t in (sample_times if sample_times is not None else [])), key=lambda t: abs(t))
    samples = []
    direction = 1.0 if s >= 0 else -1.0
    pos = 0.0
    steps = 0
    ti = 0
    while ti < len(targets) and abs(targets[ti]) <= 0.0:
        samples.append(x.copy())
        ti += 1

    def next_stop():
        return targets[ti] if ti < len(targets) and abs(targets[ti]) <= abs(s) else s

    try:
        if spec.method == "rk4":
            while abs(pos) < abs(s) - 1e-15 * max(1.0, abs(s)):
                stop = next_stop()
                h = direction * min(spec.rk4_step, abs(stop - pos))
                x = _rk4_step(f, x, h)
                pos = stop if abs(stop - pos - h) < 1e-14 * max(1.0, abs(s)) else pos + h
                steps += 1
                if steps > spec.max_steps:
                    raise StepFailure("max steps exceeded", pos)
                while ti < len(targets) and abs(targets[ti] - pos) < 1e-12 * max(1.0, abs(s)):
                    samples.append(x.copy())
                    ti += 1
        else:
            h = _initial_step(f, x, spec) * direction
            while abs(pos) < abs(s) - 1e-15 * max(1.0, abs(s)):
                stop = next_stop()
                hit = abs(h) >= abs(stop - pos)
                hh = (stop - pos) if hit else h
                hh = direction * min(abs(hh), spec.max_step)
                x_new, err = _dp_step(f, x, hh)
                scale = spec.atol + spec.rtol * np.maximum(np.abs(x), np.abs(x_new))
                enorm = math.sqrt(float(np.mean((err / scale) ** 2))) if err.size else 0.0
                steps += 1
                if steps > spec.max_steps:
                    raise StepFailure("max steps exceeded", pos)
                if not np.all(np.isfinite(x_new)):
                    enorm = math.inf
                if enorm <= 1.0:
                    x = x_new
                    pos = stop if (hit and abs(hh) == abs(stop - pos)) else pos + hh
                    if chart is not None:
                        chart.check(x)
                    while ti < len(targets) and abs(targets[ti] - pos) < 1e-12 * max(1.0, abs(s)):
                        samples.append(x.copy())
                        ti += 1
                    fac = 5.0 if enorm == 0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
                else:
                    fac = max(0.2, 0.9 * enorm ** -0.2) if math.isfinite(enorm) else 0.2
                h = direction * abs(hh) * fac
                if abs(h) < 1e-14 * max(1.0, abs(s)):
                    raise StepFailure("step size underflow", pos)
    except ChartError as exc:
        raise StepFailure(f"chart exited: {exc}", pos) from exc
    if sample_times is not None:
        return x, np.array(samples)
    return x


def _initial_step(f, x, spec):
    f0 = f(x)
    scale = spec.atol + spec.rtol * np.abs(x)
    d0 = np.sqrt(np.mean((x / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, spec.max_step, 0.1)


# -- Hamiltonian flows --------------------------------------------------------
def hamilton_rhs(H: Callable, n: int):
    """``x = (t, q, p)`` -> ``(1, dH/dp, -dH/dq)``; dual-friendly."""

    def rhs(x):
        _, jac = ad.jacobian_of(lambda z: [H(z[0], z[1 : 1 + n], z[1 + n :])], list(x))
        g = jac[0]
        return [1.0] + [g[1 + n + i] for i in range(n)] + [-g[1 + i] for i in range(n)]

    return rhs


def variational_rhs(H: Callable, n: int):
    """Flow of ``(t, q, p, Phi)`` with ``Phi' = A Phi``, ``A`` the linearised
    Hamilton vector field in ``(q, p)``."""
    from .geometry import jet2

    m = 2 * n

    def rhs(z):
        x = z[: 1 + m]
        Phi = z[1 + m :].reshape(m, m)
        j = jet2(lambda w: H(w[0], w[1 : 1 + n], w[1 + n :]), x)
        g, Hs = j.gradient, j.hessian[1:, 1:]
        Hqq, Hqp = Hs[:n, :n], Hs[:n, n:]
        Hpq, Hpp = Hs[n:, :n], Hs[n:, n:]
        A = np.block([[Hpq, Hpp], [-Hqq, -Hqp]])
        dx = np.concatenate([[1.0], g[1 + n :], -g[1 : 1 + n]])
        return np.concatenate([dx, (A @ Phi).ravel()])

    return rhs


@dataclass
class HJMap:
    """HJ transformation for a Hamiltonian ``H(t, q, p)`` with ``n`` degrees of freedom.

    ``init`` maps solution-manifold coordinates ``y`` to the initial
    ``(q0, p0)`` (identity for canonical charts); ``init_inverse`` undoes it.
    ``closed_form(y, s)`` / ``closed_inverse(t, q, p)`` are optional exact
    maps written so they accept dual numbers.
    """

    H: Callable
    n: int
    init: Callable | None = None
    init_inverse: Callable | None = None
    closed_form: Callable | None = None
    closed_inverse: Callable | None = None
    spec: FlowSpec = FlowSpec()
    sm_chart: Chart | None = None
    em_chart: Chart | None = None

    def to_initial(self, y):
        return list(y) if self.init is None else list(self.init(list(y)))

    def from_initial(self, z):
        return list(z) if self.init_inverse is None else list(self.init_inverse(list(z)))


def hj_forward(hj: HJMap, y, s: float, *, use_closed: bool = True) -> np.ndarray:
    """``(t, q, p) = (s, phi(y, s), phi*(y, s))``."""
    if use_closed and hj.closed_form is not None:
        qp = hj.closed_form(list(y), s)
        return np.array([float(s)] + [ad.primal(v) for v in qp])
    z0 = hj.to_initial(y)
    x0 = np.array([0.0] + [ad.primal(v) for v in z0])
    return integrate(hamilton_rhs(hj.H, hj.n), x0, s, hj.spec)


def hj_inverse(hj: HJMap, x, *, use_closed: bool = True) -> np.ndarray:
    """Solution-manifold coordinates of the evolution point ``x = (t, q, p)``."""
    if use_closed and hj.closed_inverse is not None:
        return np.array([ad.primal(v) for v in hj.closed_inverse(list(x))])
    x = np.array(x, dtype=float)
    back = integrate(hamilton_rhs(hj.H, hj.n), x, -x[0], hj.spec)
    return np.array([ad.primal(v) for v in hj.from_initial(list(back[1:]))])


def hj_jacobian(hj: HJMap, y, s: float, *, method: str = "variational") -> np.ndarray:
    """``d(q, p)/dy`` at time ``s``.

    ``variational`` integrates the tangent equations alongside the flow;
    ``closed`` differentiates the registered closed form (and keeps dual
    entries when ``y`` carries duals).
    """
    m = 2 * hj.n
    if method == "closed":
        if hj.closed_form is None:
            raise ValueError("no closed form registered")
        _, J = ad.jacobian_of(lambda yy: hj.closed_form(yy, s), list(y))
        return J
    if method != "variational":
        raise ValueError(f"unknown method {method!r}")
    y = [float(v) for v in y]
    _, Dinit = ad.jacobian_of(hj.to_initial, y) if hj.init is not None else (None, np.eye(m))
    z0 = np.concatenate([[0.0], hj.to_initial(y), np.eye(m).ravel()])
    z = integrate(variational_rhs(hj.H, hj.n), z0, s, hj.spec)
    Phi = z[1 + m :].reshape(m, m)
    return Phi @ np.asarray(Dinit, dtype=float)


def _matvec(J, v):
    return [sum(J[k][j] * v[j] for j in range(len(v))) for k in range(len(J))]


def lift_symmetry(hj: HJMap, X_f: VectorField, *, method: str | None = None, em_chart: Chart | None = None) -> VectorField:
    """Push a field on the solution manifold to the evolution manifold.

    The result is in evolutionary form (no ``d/dt`` component).  With closed
    forms registered the lifted field is differentiable; with the numerical
    route it is values-only.
    """
    chart = em_chart or hj.em_chart
    if chart is None:
        raise ValueError("evolution-manifold chart required")
    closed = hj.closed_form is not None and hj.closed_inverse is not None
    method = method or ("closed" if closed else "variational")

    if method == "closed":

        def comps(x):
            y = hj.closed_inverse(x)
            J = hj_jacobian(hj, y, x[0], method="closed")
            return [0.0] + _matvec(J, X_f.raw(y))

        return VectorField(chart, comps, name=f"lift({X_f.name})")

    def comps_num(x):
        y = hj_inverse(hj, x, use_closed=closed)
        J = hj_jacobian(hj, y, float(ad.primal(x[0])), method="variational")
        return [0.0] + list(J @ X_f(y))

    return VectorField(chart, comps_num, differentiable=False, name=f"lift({X_f.name})")


def evolutionary_to_traditional(X: VectorField, chi: Callable, evolution: VectorField) -> VectorField:
    """``X + chi * X_H``: completes an evolutionary field with a time component."""
    return X + evolution.scaled(chi)


def write_trajectory_csv(path, times, points, n: int, invariants: dict[str, Sequence[float]] | None = None,
                         qnames: Sequence[str] | None = None, pnames: Sequence[str] | None = None) -> list[str]:
    """Columns: ``t, q_1..q_n, p_1..p_n`` then invariants in insertion order."""
    qnames = list(qnames or [f"q{i + 1}" for i in range(n)])
    pnames = list(pnames or [f"p{i + 1}" for i in range(n)])
    invariants = invariants or {}
    header = ["t"] + qnames + pnames + list(invariants)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, (t, x) in enumerate(zip(times, points)):
            row = [t] + list(x[1 : 1 + 2 * n]) + [invariants[name][k] for name in invariants]
            w.writerow([f"{float(v):.17g}" for v in row])
    return header
