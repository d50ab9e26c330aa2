"""Lagrangian systems: momenta, Poincare-Cartan form, evolution field,
Noether invariants and contact-symmetry checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import autodiff as ad
from .flows import FlowSpec, hamilton_rhs, integrate
from .geometry import (
    Chart,
    OneForm,
    VectorField,
    exact_form,
    gradient,
    interior_d,
    jet2,
    lie_derivative_oneform,
)


class SingularLegendre(ValueError):
    """The velocity Hessian of the Lagrangian is not invertible."""


@dataclass(frozen=True)
class EvolutionPoint:
    t: float
    q: tuple[float, ...]
    w: tuple[float, ...]  # velocities or momenta
    rep: str = "momentum"

    def __post_init__(self):
        if self.rep not in ("velocity", "momentum"):
            raise ValueError(f"unknown representation {self.rep!r}")

    @classmethod
    def from_array(cls, x, n: int, rep: str = "momentum") -> "EvolutionPoint":
        x = [float(v) for v in x]
        return cls(x[0], tuple(x[1 : 1 + n]), tuple(x[1 + n : 1 + 2 * n]), rep)

    def array(self) -> np.ndarray:
        return np.array([self.t, *self.q, *self.w])


@dataclass
class LagrangianSystem:
    """``L(t, q, v)`` on ``R x T(Sigma)`` with ``n`` degrees of freedom.

    ``hamiltonian(t, q, p)`` is the Legendre-dual description; when supplied
    it also provides the inverse Legendre map ``v = dH/dp``.
    """

    n: int
    lagrangian: Callable
    hamiltonian: Callable | None = None
    regular: bool = True
    velocity_valid: Callable = field(default=lambda x: True)
    momentum_valid: Callable = field(default=lambda x: True)
    qnames: Sequence[str] | None = None
    name: str = "system"

    def __post_init__(self):
        qn = list(self.qnames or ([f"q{i + 1}" for i in range(self.n)] if self.n > 1 else ["q"]))
        self.qnames = qn
        self.velocity_chart = Chart(
            1 + 2 * self.n, tuple(["t"] + qn + [f"v_{s}" for s in qn]), self.velocity_valid, f"{self.name}:TQ"
        )
        self.momentum_chart = Chart(
            1 + 2 * self.n, tuple(["t"] + qn + [f"p_{s}" for s in qn]), self.momentum_valid, f"{self.name}:T*Q"
        )

    # -- coordinates ------------------------------------------------------
    def split(self, x):
        n = self.n
        return x[0], list(x[1 : 1 + n]), list(x[1 + n : 1 + 2 * n])

    def L(self, x):
        t, q, v = self.split(x)
        return self.lagrangian(t, q, v)

    def H(self, x):
        if self.hamiltonian is None:
            raise ValueError(f"{self.name}: no Hamiltonian registered")
        t, q, p = self.split(x)
        return self.hamiltonian(t, q, p)

    def chart(self, rep: str) -> Chart:
        return self.velocity_chart if rep == "velocity" else self.momentum_chart


def _velocity_hessian(sys: LagrangianSystem, x):
    n = sys.n
    j = jet2(sys.L, x)
    return j, j.hessian[1 + n :, 1 + n :]


def _check_regular(W: np.ndarray, name: str):
    if not np.all(np.isfinite(W)) or np.linalg.cond(W) > 1e12:
        raise SingularLegendre(f"{name}: velocity Hessian singular (cond={np.linalg.cond(W):.3g})")


def momenta(sys: LagrangianSystem, x, *, require_inversion: bool = False) -> np.ndarray:
    """``p_i = dL/dv^i`` at a velocity-chart point ``x = (t, q, v)``."""
    if isinstance(x, EvolutionPoint):
        if x.rep != "velocity":
            raise ValueError("momenta() needs a velocity-representation point")
        x = x.array()
    sys.velocity_chart.check(x)
    n = sys.n
    if require_inversion:
        _, W = _velocity_hessian(sys, x)
        _check_regular(W, sys.name)
    return gradient(sys.L, x)[1 + n :]


def _momenta_generic(sys: LagrangianSystem, x):
    n = sys.n
    _, jac = ad.jacobian_of(lambda z: [sys.L(z)], list(x))
    return list(jac[0][1 + n :])


def legendre(sys: LagrangianSystem, x) -> np.ndarray:
    """``(t, q, v) -> (t, q, p)``."""
    x = np.asarray(x, dtype=float)
    p = momenta(sys, x)
    return np.concatenate([x[: 1 + sys.n], p])


def inverse_legendre(sys: LagrangianSystem, x, *, tol: float = 1e-14, max_iter: int = 50) -> np.ndarray:
    """``(t, q, p) -> (t, q, v)``: ``v = dH/dp`` when ``H`` is known, else Newton."""
    x = np.asarray(x, dtype=float)
    n = sys.n
    if sys.hamiltonian is not None:
        v = gradient(sys.H, x)[1 + n :]
        return np.concatenate([x[: 1 + n], v])
    p = x[1 + n :]
    v = p.copy()
    for _ in range(max_iter):
        y = np.concatenate([x[: 1 + n], v])
        j, W = _velocity_hessian(sys, y)
        _check_regular(W, sys.name)
        r = j.gradient[1 + n :] - p
        dv = np.linalg.solve(W, r)
        v = v - dv
        if np.max(np.abs(dv)) < tol * max(1.0, np.max(np.abs(v))):
            break
    return np.concatenate([x[: 1 + n], v])


def poincare_cartan(sys: LagrangianSystem, rep: str = "velocity") -> OneForm:
    """``p (dq - v dt) + L dt``.

    Velocity chart components are ``(L - p.v, p, 0)``; momentum chart
    components are ``(-H, p, 0)``.
    """
    n = sys.n
    if rep == "velocity":

        def comps(x):
            p = _momenta_generic(sys, x)
            _, _, v = sys.split(x)
            L = sys.L(x)
            return [L - sum(pi * vi for pi, vi in zip(p, v))] + p + [0.0] * n

        return OneForm(sys.velocity_chart, comps, name=f"Theta_PC[{sys.name}]")

    def comps_p(x):
        _, _, p = sys.split(x)
        return [-sys.H(x)] + list(p) + [0.0] * n

    return OneForm(sys.momentum_chart, comps_p, name=f"Theta_PC[{sys.name}]")


def lagrangian_form(sys: LagrangianSystem) -> OneForm:
    """``L dt`` on the velocity chart."""
    n = sys.n
    return OneForm(sys.velocity_chart, lambda x: [sys.L(x)] + [0.0] * (2 * n), name=f"L dt[{sys.name}]")


def evolution_field(sys: LagrangianSystem, rep: str = "momentum") -> VectorField:
    """The field spanning the kernel of ``d Theta_PC`` with unit time component."""
    if not sys.regular:
        raise SingularLegendre(f"{sys.name}: declared non-regular")
    n = sys.n
    if rep == "momentum":
        rhs = hamilton_rhs(sys.hamiltonian, n)
        return VectorField(sys.momentum_chart, rhs, name="X_H")

    def comps(x):
        x = [ad.primal(v) for v in x]
        j, W = _velocity_hessian(sys, x)
        _check_regular(W, sys.name)
        v = np.array(x[1 + n :])
        Hs = j.hessian
        rhs = j.gradient[1 : 1 + n] - Hs[1 + n :, 1 : 1 + n] @ v - Hs[1 + n :, 0]
        a = np.linalg.solve(W, rhs)
        return [1.0] + list(v) + list(a)

    return VectorField(sys.velocity_chart, comps, differentiable=False, name="X_H")


@dataclass
class SymmetryCandidate:
    Y: VectorField
    f: Callable | None = None  # gauge function; None means zero
    name: str = ""

    def gauge(self, x):
        return 0.0 if self.f is None else self.f(x)


def noether_invariant(sys: LagrangianSystem, cand: SymmetryCandidate, form: OneForm | None = None) -> Callable:
    """``F = i_Y Theta - f_Y`` as an evaluatable scalar field."""
    rep = "velocity" if cand.Y.chart == sys.velocity_chart else "momentum"
    theta = form or poincare_cartan(sys, rep)

    def F(x):
        comps = theta.components(list(x))
        Y = cand.Y.components(list(x))
        return sum(a * b for a, b in zip(comps, Y)) - cand.gauge(x)

    return F


@dataclass(frozen=True)
class SampleSpec:
    """``n`` seeded points drawn by ``sampler(rng)``."""

    sampler: Callable
    n: int = 20
    seed: int = 0

    def points(self) -> list[np.ndarray]:
        rng = np.random.default_rng(self.seed)
        return [np.asarray(self.sampler(rng), dtype=float) for _ in range(self.n)]


@dataclass
class ContactReport:
    is_symmetry: bool
    max_residual: float
    tolerance: float
    residuals: list[float]
    conservation_drift: float | None = None

    def as_dict(self):
        return {
            "is_symmetry": self.is_symmetry,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "conservation_drift": self.conservation_drift,
        }


def contact_residual(form: OneForm, cand: SymmetryCandidate, x) -> np.ndarray:
    """``L_Y theta - d f_Y`` at ``x``."""
    LY = lie_derivative_oneform(cand.Y, form, x)
    if cand.f is None:
        return LY
    return LY - gradient(cand.f, x)


def check_contact_symmetry(
    sys: LagrangianSystem,
    cand: SymmetryCandidate,
    samples: SampleSpec | Iterable,
    *,
    tol: float = 1e-8,
    form: OneForm | None = None,
    trajectories: Sequence | None = None,
    duration: float = 10.0,
    spec: FlowSpec = FlowSpec(),
) -> ContactReport:
    """Semi-invariance verdict for ``cand`` against ``form`` (default ``Theta_PC``).

    ``trajectories`` is a list of initial points (in the candidate's chart)
    along which the Noether invariant drift is additionally measured.
    """
    rep = "velocity" if cand.Y.chart == sys.velocity_chart else "momentum"
    theta = form or poincare_cartan(sys, rep)
    pts = samples.points() if isinstance(samples, SampleSpec) else list(samples)
    res = [float(np.max(np.abs(contact_residual(theta, cand, x)))) for x in pts]
    worst = max(res) if res else 0.0
    drift = None
    if trajectories:
        F = noether_invariant(sys, cand, theta)
        drift = max(invariant_drift(sys, F, x0, duration, rep=rep, spec=spec) for x0 in trajectories)
    return ContactReport(worst < tol, worst, tol, res, drift)


def invariant_drift(sys, F, x0, duration: float, *, rep: str = "momentum", n_samples: int = 21,
                    spec: FlowSpec = FlowSpec()) -> float:
    """``max |F(x(s)) - F(x0)|`` along the flow from ``x0``."""
    X = evolution_field(sys, rep)
    times = np.linspace(0.0, duration, n_samples)
    _, traj = integrate(X, x0, duration, spec, sample_times=times)
    F0 = F(list(traj[0]))
    return max(abs(F(list(x)) - F0) for x in traj)


def kernel_residual(sys: LagrangianSystem, x, rep: str = "momentum") -> float:
    """``max_a |(i_{X_H} d Theta_PC)_a|`` at ``x``."""
    theta = poincare_cartan(sys, rep)
    X = evolution_field(sys, rep)
    return float(np.max(np.abs(interior_d(theta, X, x))))


def euler_lagrange_residual(sys: LagrangianSystem, samples: Iterable) -> float:
    """``max || d/dt(dL/dv) - dL/dq ||`` over ``(t, q, qdot, qddot)`` samples."""
    n = sys.n
    worst = 0.0
    for t, q, qd, qdd in samples:
        x = np.concatenate([[t], np.atleast_1d(q), np.atleast_1d(qd)]).astype(float)
        j = jet2(sys.L, x)
        Hs = j.hessian
        qd = np.atleast_1d(np.asarray(qd, dtype=float))
        qdd = np.atleast_1d(np.asarray(qdd, dtype=float))
        ddt = Hs[1 + n :, 0] + Hs[1 + n :, 1 : 1 + n] @ qd + Hs[1 + n :, 1 + n :] @ qdd
        r = ddt - j.gradient[1 : 1 + n]
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


__all__ = [
    "ContactReport",
    "EvolutionPoint",
    "LagrangianSystem",
    "SampleSpec",
    "SingularLegendre",
    "SymmetryCandidate",
    "check_contact_symmetry",
    "contact_residual",
    "euler_lagrange_residual",
    "evolution_field",
    "exact_form",
    "inverse_legendre",
    "invariant_drift",
    "kernel_residual",
    "lagrangian_form",
    "legendre",
    "momenta",
    "noether_invariant",
    "poincare_cartan",
]
