"""Charts, vector fields, one-forms and the first-order calculus on them.

Every field is a plain callable on a point (a sequence of scalars) and is
written so that it accepts dual numbers; derivatives are therefore exact
forward-mode derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import autodiff as ad


class ChartError(ValueError):
    """A point lies outside the validity domain of its chart."""


class ChartMismatch(ValueError):
    """Two geometric objects live on different charts."""


def _always_valid(x) -> bool:
    return True


@dataclass(frozen=True)
class Chart:
    dim: int
    names: tuple[str, ...]
    valid: Callable[[Sequence[float]], bool] = field(default=_always_valid, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("chart dimension must be positive")
        if len(self.names) != self.dim:
            raise ValueError("one coordinate name per dimension")

    def check(self, x) -> None:
        if len(x) != self.dim:
            raise ChartError(f"{self.label or 'chart'}: expected {self.dim} coordinates, got {len(x)}")
        if not self.valid([ad.primal(v) for v in x]):
            raise ChartError(f"{self.label or 'chart'}: point outside validity domain")


def same_chart(*objs) -> Chart:
    chart = objs[0].chart
    for o in objs[1:]:
        if o.chart != chart:
            raise ChartMismatch(f"{o.chart.label!r} vs {chart.label!r}")
    return chart


@dataclass(frozen=True)
class Jet2:
    value: float
    gradient: np.ndarray
    hessian: np.ndarray


def jet2(f: Callable, x, chart: Chart | None = None, *, fd_step: float | None = None) -> Jet2:
    """Value, gradient and Hessian of the scalar field ``f`` at ``x``.

    Derivatives are exact (two nested dual levels).  Passing ``fd_step`` switches
    to central finite differences, which exists only as a cross-check.
    """
    if chart is not None:
        chart.check(x)
    x = [float(v) for v in x]
    n = len(x)
    if fd_step is not None:
        return _jet2_fd(f, x, fd_step)
    xs = ad.seed(x, 2)
    outer, inner = xs[0].tag, xs[0].val.tag
    y = f(xs)
    if isinstance(y, ad.Dual) and y.tag == outer:
        first, rows = y.val, y.grad
    else:
        first, rows = y, [0.0] * n
    value, grad = ad.value_and_grad(first, n, inner)
    hess = np.zeros((n, n))
    for j, r in enumerate(rows):
        hess[j] = ad.value_and_grad(r, n, inner)[1]
    return Jet2(float(value), np.asarray(grad, dtype=float), hess)


def _jet2_fd(f, x, h):
    n = len(x)
    x = np.asarray(x, dtype=float)

    def ev(p):
        return float(f(list(p)))

    value = ev(x)
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    e = np.eye(n) * h
    for i in range(n):
        grad[i] = (ev(x + e[i]) - ev(x - e[i])) / (2 * h)
        for j in range(i, n):
            hess[i, j] = (
                ev(x + e[i] + e[j]) - ev(x + e[i] - e[j]) - ev(x - e[i] + e[j]) + ev(x - e[i] - e[j])
            ) / (4 * h * h)
            hess[j, i] = hess[i, j]
    return Jet2(value, grad, hess)


def gradient(f: Callable, x) -> np.ndarray:
    """First derivatives only (one dual level)."""
    _, jac = ad.jacobian_of(lambda p: [f(p)], x)
    return jac[0]


class VectorField:
    """Components ``Y^k(x)`` on a chart.

    ``components`` must accept dual numbers unless ``differentiable=False``, in
    which case only values are available (no Lie derivatives along it).
    """

    def __init__(self, chart: Chart, components: Callable, *, differentiable: bool = True, name: str = ""):
        self.chart = chart
        self.components = components
        self.differentiable = differentiable
        self.name = name

    def __call__(self, x) -> np.ndarray:
        self.chart.check(x)
        return np.array([ad.primal(c) for c in self.components(list(x))])

    def raw(self, x):
        return list(self.components(list(x)))

    def jacobian(self, x):
        """(values, J) with ``J[k, s] = d Y^k / d x^s``."""
        if not self.differentiable:
            raise TypeError(f"vector field {self.name!r} is values-only")
        self.chart.check(x)
        return ad.jacobian_of(self.components, x)

    def __add__(self, other: "VectorField") -> "VectorField":
        same_chart(self, other)
        return VectorField(
            self.chart,
            lambda x: [a + b for a, b in zip(self.components(x), other.components(x))],
            differentiable=self.differentiable and other.differentiable,
            name=f"({self.name}+{other.name})",
        )

    def __neg__(self) -> "VectorField":
        return self.scaled(lambda x: -1.0)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def scaled(self, g: Callable) -> "VectorField":
        """The field ``g(x) * Y(x)`` for a scalar field ``g``."""
        return VectorField(
            self.chart,
            lambda x: [g(x) * c for c in self.components(x)],
            differentiable=self.differentiable,
            name=f"g*{self.name}",
        )


def constant_field(chart: Chart, vec, name: str = "") -> VectorField:
    vec = [float(v) for v in vec]
    return VectorField(chart, lambda x: list(vec), name=name)


def coordinate_field(chart: Chart, k: int) -> VectorField:
    vec = [0.0] * chart.dim
    vec[k] = 1.0
    return constant_field(chart, vec, name=f"d/d{chart.names[k]}")


class OneForm:
    """Covariant components ``theta_a(x)``; ``jacobian_fn`` may supply exact
    first derivatives when the components are not dual-friendly."""

    def __init__(self, chart: Chart, components: Callable, *, jacobian_fn: Callable | None = None, name: str = ""):
        self.chart = chart
        self.components = components
        self.jacobian_fn = jacobian_fn
        self.name = name

    def __call__(self, x) -> np.ndarray:
        self.chart.check(x)
        return np.array([ad.primal(c) for c in self.components(list(x))])

    def jacobian(self, x):
        """(values, J) with ``J[b, a] = d theta_b / d x^a``."""
        self.chart.check(x)
        if self.jacobian_fn is not None:
            return self.jacobian_fn(x)
        return ad.jacobian_of(self.components, x)

    def pair(self, X: VectorField, x) -> float:
        same_chart(self, X)
        return float(np.dot(self(x), X(x)))


def exact_form(chart: Chart, f: Callable, name: str = "") -> OneForm:
    """``df`` with its derivatives taken from the Hessian of ``f``."""

    def comps(x):
        _, jac = ad.jacobian_of(lambda p: [f(p)], x)
        return list(jac[0])

    def jac(x):
        j = jet2(f, x)
        return j.gradient, j.hessian

    return OneForm(chart, comps, jacobian_fn=jac, name=name or "df")


def exterior_derivative(theta: OneForm, x) -> np.ndarray:
    """Matrix ``F[a, b] = d_a theta_b - d_b theta_a`` of the two-form ``d theta``."""
    _, J = theta.jacobian(x)
    D = np.asarray(J, dtype=float).T  # D[a, b] = d_a theta_b
    return D - D.T


def lie_bracket(X: VectorField, Y: VectorField, x) -> np.ndarray:
    """``[X, Y]^k = X^s d_s Y^k - Y^s d_s X^k``."""
    same_chart(X, Y)
    xv, JX = X.jacobian(x)
    yv, JY = Y.jacobian(x)
    return np.asarray(JY @ xv - JX @ yv, dtype=float)


def bracket_field(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]`` as a field whose components accept duals (so it can be bracketed again)."""
    same_chart(X, Y)

    def comps(x):
        xv, JX = ad.jacobian_of(X.components, x)
        yv, JY = ad.jacobian_of(Y.components, x)
        n = len(x)
        return [sum(JY[k][s] * xv[s] - JX[k][s] * yv[s] for s in range(n)) for k in range(n)]

    return VectorField(X.chart, comps, name=f"[{X.name},{Y.name}]")


def d_oneform(theta: OneForm, X: VectorField, Y: VectorField, x) -> float:
    """``d theta (X, Y)``.

    Evaluated in coordinates as ``(d_a theta_b - d_b theta_a) X^a Y^b``, which
    equals ``X(theta(Y)) - Y(theta(X)) - theta([X, Y])`` and needs no
    derivatives of ``X`` or ``Y``.
    """
    same_chart(theta, X, Y)
    F = exterior_derivative(theta, x)
    return float(X(x) @ F @ Y(x))


def interior_d(theta: OneForm, X: VectorField, x) -> np.ndarray:
    """Components of the one-form ``i_X d theta``."""
    same_chart(theta, X)
    F = exterior_derivative(theta, x)
    return X(x) @ F


def lie_derivative_oneform(Y: VectorField, theta: OneForm, x) -> np.ndarray:
    """``(L_Y theta)_b = Y^a d_a theta_b + theta_a d_b Y^a`` (Cartan's formula)."""
    same_chart(Y, theta)
    yv, JY = Y.jacobian(x)
    tv, JT = theta.jacobian(x)
    yv = np.asarray(yv, dtype=float)
    return np.asarray(JT, dtype=float) @ yv + np.asarray(JY, dtype=float).T @ np.asarray(tv, dtype=float)


def lie_derivative_form(Y: VectorField, theta: OneForm) -> OneForm:
    """``L_Y theta`` as a one-form whose components accept duals, so that
    ``d(L_Y theta)`` can be taken (used to show no gauge function exists)."""
    same_chart(Y, theta)
    if theta.jacobian_fn is not None:
        raise TypeError("theta must have dual-friendly components")

    def comps(x):
        yv, JY = ad.jacobian_of(Y.components, x)
        tv, JT = ad.jacobian_of(theta.components, x)
        n = len(x)
        return [
            sum(JT[b][a] * yv[a] for a in range(n)) + sum(JY[a][b] * tv[a] for a in range(n))
            for b in range(n)
        ]

    return OneForm(Y.chart, comps, name=f"L_{Y.name}{theta.name}")
