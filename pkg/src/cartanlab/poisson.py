"""Poisson structure on the solution manifold.

Sign convention: ``Omega = dP ^ dQ`` in canonical charts, Hamiltonian fields
satisfy ``i_{X_f} Omega = -df`` and ``{f, g} = X_f g``, so ``{P, Q} = +1``
and ``{f, g} = df/dP dg/dQ - df/dQ dg/dP``.  In matrix form
``{f, g} = grad f . Pi . grad g`` with ``Pi = -Omega^{-1}``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import autodiff as ad
from .geometry import Chart, OneForm, VectorField


class SingularOmega(ValueError):
    """The symplectic matrix is degenerate at the requested point."""


class SMChart:
    """A chart on the solution manifold with its symplectic matrix.

    ``omega(x)`` returns ``Omega[a, b] = Omega(d_a, d_b)`` and must accept
    duals when brackets of brackets are needed.  ``liouville`` is an optional
    symplectic potential with ``d Lambda = Omega``.
    """

    def __init__(self, chart: Chart, omega: Callable, *, kind: str = "canonical",
                 liouville: OneForm | None = None, constant: bool = False):
        if kind not in ("canonical", "group"):
            raise ValueError(f"unknown chart kind {kind!r}")
        self.chart = chart
        self.omega = omega
        self.kind = kind
        self.liouville = liouville
        self.constant = constant
        self._pi_const = None
        if constant:
            W = np.asarray(omega(None), dtype=float)
            self._pi_const = -np.linalg.inv(W)

    @property
    def dim(self) -> int:
        return self.chart.dim

    def omega_matrix(self, x) -> np.ndarray:
        return np.asarray([[ad.primal(v) for v in row] for row in self.omega(x)], dtype=float)

    def poisson_tensor(self, x):
        """``Pi = -Omega^{-1}``; keeps dual entries when ``x`` has them."""
        if self._pi_const is not None:
            return self._pi_const
        W = self.omega(x)
        if abs(np.linalg.det(_primal_matrix(W))) < 1e-12:
            raise SingularOmega(f"{self.chart.label}: degenerate symplectic matrix")
        inv = inverse_matrix(W)
        return [[-v for v in row] for row in inv]


def _primal_matrix(M):
    return np.array([[ad.primal(v) for v in row] for row in M], dtype=float)


def inverse_matrix(M):
    """Gauss-Jordan inverse that accepts dual-number entries."""
    n = len(M)
    A = [list(row) + [1.0 if i == j else 0.0 for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(ad.primal(A[r][col])))
        if abs(ad.primal(A[piv][col])) < 1e-300:
            raise SingularOmega("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        inv_p = 1.0 / A[col][col]
        A[col] = [v * inv_p for v in A[col]]
        for r in range(n):
            if r != col:
                fac = A[r][col]
                if ad.primal(fac) != 0.0 or ad.is_dual(fac):
                    A[r] = [a - fac * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def canonical_chart(n: int = 1, qnames: Sequence[str] | None = None, pnames: Sequence[str] | None = None,
                    label: str = "SM") -> SMChart:
    """Darboux chart ``(Q_1..Q_n, P_1..P_n)`` with ``Omega = sum dP_i ^ dQ_i``."""
    qn = list(qnames or ([f"Q{i + 1}" for i in range(n)] if n > 1 else ["Q"]))
    pn = list(pnames or ([f"P{i + 1}" for i in range(n)] if n > 1 else ["P"]))
    W = np.zeros((2 * n, 2 * n))
    for i in range(n):
        W[n + i, i] = 1.0
        W[i, n + i] = -1.0
    chart = Chart(2 * n, tuple(qn + pn), label=label)
    liou = OneForm(chart, lambda x: list(x[n:]) + [0.0] * n, name="PdQ")
    return SMChart(chart, lambda x: W, kind="canonical", liouville=liou, constant=True)


def chart_from_liouville(liouville: OneForm, *, kind: str = "group") -> SMChart:
    """``Omega = d Lambda`` computed with duals so it can be differentiated again."""

    def omega(x):
        _, J = ad.jacobian_of(liouville.components, list(x))
        n = len(x)
        return [[J[b][a] - J[a][b] for b in range(n)] for a in range(n)]

    return SMChart(liouville.chart, omega, kind=kind, liouville=liouville)


@dataclass
class Observable:
    chart: SMChart
    f: Callable
    name: str = ""

    def __call__(self, x):
        return self.f(list(x))


def _grad(f, x):
    _, J = ad.jacobian_of(lambda p: [f(p)], list(x))
    return J[0]


def _bracket_value(chart: SMChart, f: Callable, g: Callable, x):
    Pi = chart.poisson_tensor(x)
    df, dg = _grad(f, x), _grad(g, x)
    n = len(x)
    return sum(df[a] * Pi[a][b] * dg[b] for a in range(n) for b in range(n)
               if ad.is_dual(Pi[a][b]) or ad.primal(Pi[a][b]) != 0.0)


def poisson_bracket(f: Observable, g: Observable, x) -> float:
    if f.chart is not g.chart:
        raise ValueError("observables on different charts")
    f.chart.chart.check(x)
    return ad.primal(_bracket_value(f.chart, f.f, g.f, x))


def bracket(f: Observable, g: Observable) -> Observable:
    """``{f, g}`` as an observable (dual-friendly, so it can be bracketed again)."""
    return Observable(f.chart, lambda x: _bracket_value(f.chart, f.f, g.f, x), name=f"{{{f.name},{g.name}}}")


def hamiltonian_field(f: Observable) -> VectorField:
    """``X_f`` with ``i_{X_f} Omega = -df``, i.e. ``X_f = Omega^{-1} df``."""
    ch = f.chart

    def comps(x):
        Pi = ch.poisson_tensor(x)
        df = _grad(f.f, x)
        n = len(x)
        # X^b = -Pi[a][b] df_a ... equivalently (Omega^{-1} df)^b
        return [sum(df[a] * Pi[a][b] for a in range(n)) for b in range(n)]

    return VectorField(ch.chart, comps, name=f"X_{f.name}")


def interior_omega(chart: SMChart, X: VectorField, x) -> np.ndarray:
    """Components ``(i_X Omega)_b = X^a Omega[a, b]``."""
    return X(x) @ chart.omega_matrix(x)


@dataclass
class BracketTable:
    names: list[str]
    basis_names: list[str]
    pairs: list[tuple[str, str]]
    constants: dict[str, dict[str, float]]
    residuals: dict[str, float]
    antisymmetry: float
    max_residual: float
    condition: float
    tolerance: float
    seed: int | None
    n_points: int
    closes: bool = field(default=False)

    def coefficient(self, a: str, b: str, basis: str) -> float:
        return self.constants[f"{{{a},{b}}}"][basis]

    def as_dict(self) -> dict:
        return {
            "observables": self.names,
            "basis": self.basis_names,
            "constants": self.constants,
            "residuals": self.residuals,
            "antisymmetry": self.antisymmetry,
            "max_residual": self.max_residual,
            "condition_number": self.condition,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "n_points": self.n_points,
            "closes": self.closes,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, **kw)


def structure_constants(obs: Sequence[Observable], basis: Sequence[Observable], points: Sequence,
                        *, tol: float = 1e-7, seed: int | None = None, chop: float = 1e-10) -> BracketTable:
    """Least-squares fit of every ``{a, b}`` onto ``span(basis + [1])``.

    ``points`` are sample points on the common chart.  Fitted coefficients
    with magnitude below ``chop`` are reported as zero.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    k = len(basis) + 1
    if len(pts) < k + 1:
        raise ValueError(f"need at least {k + 1} sample points, got {len(pts)}")
    A = np.array([[ad.primal(b(p)) for b in basis] + [1.0] for p in pts])
    cond = float(np.linalg.cond(A))
    if cond > 1e10:
        warnings.warn(f"ill-conditioned design matrix (cond={cond:.3g})", RuntimeWarning)
    bnames = [b.name for b in basis] + ["1"]
    constants, residuals, pairs = {}, {}, []
    anti = 0.0
    for i, a in enumerate(obs):
        for j in range(i + 1, len(obs)):
            b = obs[j]
            ab = np.array([poisson_bracket(a, b, p) for p in pts])
            ba = np.array([poisson_bracket(b, a, p) for p in pts])
            anti = max(anti, float(np.max(np.abs(ab + ba))))
            c, *_ = np.linalg.lstsq(A, ab, rcond=None)
            res = float(np.max(np.abs(A @ c - ab)))
            key = f"{{{a.name},{b.name}}}"
            constants[key] = {n: (0.0 if abs(v) < chop else float(v)) for n, v in zip(bnames, c)}
            residuals[key] = res
            pairs.append((a.name, b.name))
    worst = max(residuals.values()) if residuals else 0.0
    return BracketTable(
        names=[o.name for o in obs], basis_names=bnames, pairs=pairs, constants=constants,
        residuals=residuals, antisymmetry=anti, max_residual=worst, condition=cond,
        tolerance=tol, seed=seed, n_points=len(pts), closes=worst < tol,
    )


def _lookup(table: BracketTable, a: str, b: str):
    """Fitted coefficients of ``{a, b}``, using antisymmetry if only ``{b, a}`` was fitted."""
    key, rev = f"{{{a},{b}}}", f"{{{b},{a}}}"
    if key in table.constants:
        return table.constants[key]
    if rev in table.constants:
        return {n: -v for n, v in table.constants[rev].items()}
    raise KeyError(f"bracket {key} not in table")


def compare_tables(table: BracketTable, expected: dict[str, dict[str, float]], *,
                   signs: Sequence[int] = (1,)) -> dict:
    """Max coefficient difference against ``expected`` (missing entries mean 0).

    ``signs`` lists the global sign conventions to try; the best one is
    reported together with the per-bracket differences it leaves.
    """
    best = None
    for sgn in signs:
        per = {}
        for key, coeffs in expected.items():
            a, b = key.strip("{}").split(",")
            fitted = _lookup(table, a, b)
            names = set(fitted) | set(coeffs)
            per[key] = max(abs(fitted.get(n, 0.0) - sgn * coeffs.get(n, 0.0)) for n in names) if names else 0.0
        worst = max(per.values()) if per else 0.0
        if best is None or worst < best["max_difference"]:
            best = {"sign": sgn, "max_difference": worst, "per_bracket": per}
    return best
