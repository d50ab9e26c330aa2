"""Harmonic oscillator with a ``lam q^n / n`` perturbation.

The printed first-order solutions and lifted Newton-Hook fields are
transcribed verbatim below (``printed_solutions``, ``printed_newton_hook``)
so that the Magnus output can be compared with them term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import trigpoly as tp
from ..flows import FlowSpec, HJMap, integrate, hamilton_rhs
from ..geometry import Chart, VectorField, exterior_derivative, lie_derivative_form
from ..magnus import (MagnusConfig, interaction_picture,
                      pushforward_field, quartic_interaction)
from ..mechanics import LagrangianSystem, poincare_cartan
from ..trigpoly import TrigPoly

# symbolic atoms used by the transcriptions
_m = TrigPoly.const(1, m=1)
_w = TrigPoly.const(1, w=1)
_lam = TrigPoly.const(1, lam=1)
_q = tp.X
_p = tp.Y
_t = tp.T


def _c(k):
    return tp.cos_wt(k)


def _s(k):
    return tp.sin_wt(k)


def _pre(num, den, me, we):
    """``num/den * lam * m^me * w^we``."""
    return TrigPoly.const(Fraction(num, den), m=me, w=we, lam=1)


@dataclass(frozen=True)
class AnharmonicOscillator:
    m: float = 1.0
    omega: float = 1.0
    lam: float = 1e-3
    n: int = 4

    def __post_init__(self):
        if self.m <= 0 or self.omega <= 0 or self.lam < 0:
            raise ValueError("need m > 0, omega > 0, lam >= 0")
        if self.n < 1:
            raise ValueError("exponent must be positive")

    def potential(self, q):
        return 0.5 * self.m * self.omega**2 * q * q + self.lam * q**self.n / self.n

    def system(self) -> LagrangianSystem:
        m = self.m
        return LagrangianSystem(
            1,
            lambda t, q, v: 0.5 * m * v[0] * v[0] - self.potential(q[0]),
            lambda t, q, p: p[0] * p[0] / (2 * m) + self.potential(q[0]),
            name="anharmonic",
        )

    def hamiltonian(self, t, q, p):
        return p[0] * p[0] / (2 * self.m) + self.potential(q[0])

    def hj(self, spec: FlowSpec = FlowSpec(atol=1e-13, rtol=1e-13)) -> HJMap:
        """Numerical HJ map; closed forms are attached when ``lam == 0``."""
        from .. import autodiff as ad

        m, w = self.m, self.omega
        closed = closed_inv = None
        if self.lam == 0:
            def closed(y, s):
                c, sn = ad.cos(w * s), ad.sin(w * s)
                return [y[0] * c + y[1] / (m * w) * sn, y[1] * c - m * w * y[0] * sn]

            def closed_inv(x):
                c, sn = ad.cos(w * x[0]), ad.sin(w * x[0])
                return [x[1] * c - x[2] / (m * w) * sn, x[2] * c + m * w * x[1] * sn]

        return HJMap(H=self.hamiltonian, n=1, closed_form=closed, closed_inverse=closed_inv, spec=spec,
                     sm_chart=Chart(2, ("Q", "P"), label="anharmonic:SM"), em_chart=self.system().momentum_chart)

    def oracle(self, Q, P, t, lam=None, tol=1e-13):
        """High-accuracy numerical ``(q(t), p(t))`` from ``(Q, P)``."""
        osc = self if lam is None else AnharmonicOscillator(self.m, self.omega, lam, self.n)
        x = integrate(hamilton_rhs(osc.hamiltonian, 1), [0.0, Q, P], t, FlowSpec(atol=tol, rtol=tol))
        return float(x[1]), float(x[2])

    def magnus(self, order: int = 1):
        cfg = MagnusConfig(order=order, exponent=self.n)
        return interaction_picture(quartic_interaction(self.n), cfg)

    def evaluate(self, f: TrigPoly, X, Y, t, lam=None):
        return f.evaluate(X, Y, t, self.m, self.omega, self.lam if lam is None else lam)


# -- printed first-order solutions ------------------------------------------
def printed_solutions() -> dict[str, TrigPoly]:
    q0, p0, m, w, t = _q, _p, _m, _w, _t
    Q, P = _q, _p
    q_em0 = q0 + _pre(1, 32, -4, -5) * (
        -9 * m * w * p0**2 * q0 + 12 * w * p0**3 * t - 5 * m**3 * w**3 * q0**3
        + 12 * m**2 * w**3 * p0 * q0**2 * t - 8 * p0**3 * _s(2)
        + w * _c(2) * (4 * m**3 * q0**3 * w**2 + 12 * m * p0**2 * q0)
        + w * _c(4) * (m**3 * q0**3 * w**2 - 3 * m * p0**2 * q0)
        + _s(4) * (p0**3 - 3 * m**2 * w**2 * p0 * q0**2)
    )
    q_inv = Q * _c(1) + (P * _s(1)).scale(1, m=-1, w=-1)
    q_sm = q_inv + _pre(1, 32, -4, -5) * (
        w * _c(1) * (-(m**3) * w**2 * Q**3 + 12 * m**2 * w**2 * P * Q**2 * t + 3 * m * P**2 * Q + 12 * P**3 * t)
        + _s(1) * (-12 * m**3 * Q**3 * t * w**4 - 21 * m**2 * P * Q**2 * w**2 - 12 * m * P**2 * Q * t * w**2 - 9 * P**3)
        + w * _c(3) * (m**3 * w**2 * Q**3 - 3 * m * P**2 * Q)
        + _s(3) * (3 * m**2 * w**2 * P * Q**2 - P**3)
    )
    p_em0 = p0 - _pre(1, 32, -3, -4) * (
        12 * m**3 * w**4 * q0**3 * t - 15 * m**2 * w**2 * p0 * q0**2 + 12 * m * w**2 * p0**2 * q0 * t - 3 * p0**3
        + 8 * m**3 * w**3 * q0**3 * _s(2)
        + _c(2) * (12 * m**2 * w**2 * p0 * q0**2 + 4 * p0**3)
        + _c(4) * (3 * m**2 * w**2 * p0 * q0**2 - p0**3)
        + w * _s(4) * (m**3 * w**2 * q0**3 - 3 * m * p0**2 * q0)
    )
    p_inv = P * _c(1) - (Q * _s(1)).scale(1, m=1, w=1)
    p_sm = p_inv - _pre(1, 32, -3, -4) * (
        w * _s(1) * (11 * m**3 * w**2 * Q**3 + 12 * m**2 * w**2 * P * Q**2 * t + 15 * m * P**2 * Q + 12 * P**3 * t)
        + _c(1) * (12 * m**3 * w**4 * Q**3 * t + 9 * m**2 * w**2 * P * Q**2 + 12 * m * w**2 * P**2 * Q * t - 3 * P**3)
        + w * _s(3) * (3 * m**3 * w**2 * Q**3 - 9 * m * P**2 * Q)
        + _c(3) * (3 * P**3 - 9 * m**2 * w**2 * P * Q**2)
    )
    return {"q_em0": q_em0, "p_em0": p_em0, "q_sm": q_sm, "p_sm": p_sm}


def printed_newton_hook() -> dict[str, tuple[TrigPoly, TrigPoly]]:
    """``(d/dq, d/dp)`` components of the printed lifted fields in ``(q, p, t)``."""
    q, p, m, w, t = _q, _p, _m, _w, _t
    u = q * _c(1) - (p * _s(1)).scale(1, m=-1, w=-1)
    X_t = (-_pre(1, 1, -3, -3) * _s(1) * u**3, -_pre(1, 1, -2, -2) * _c(1) * u**3)
    xq0_q = _c(1) + _pre(3, 32, -3, -4) * (
        _c(1) * (-3 * m**2 * w**2 * q**2 + 8 * m * w**2 * p * q * t + 3 * p**2)
        + w * _s(1) * (-4 * m**2 * w**2 * q**2 * t + 10 * m * p * q - 12 * p**2 * t)
        + _c(3) * (3 * m**2 * w**2 * q**2 - 3 * p**2)
        - 6 * m * w * p * q * _s(3)
    )
    xq0_p = -(m * w * _s(1)) - _pre(3, 32, -2, -3) * (
        w * _c(1) * (12 * m**2 * w**2 * q**2 * t - 6 * m * p * q + 4 * p**2 * t)
        + _s(1) * (11 * m**2 * q**2 * w**2 - 8 * m * p * q * t * w**2 + 5 * p**2)
        + 6 * m * w * p * q * _c(3)
        + _s(3) * (3 * m**2 * w**2 * q**2 - 3 * p**2)
    )
    xp0_q = _s(1).scale(1, m=-1, w=-1) + _pre(3, 32, -4, -5) * (
        w * _c(1) * (4 * m**2 * w**2 * q**2 * t - 2 * m * p * q + 12 * p**2 * t)
        + _s(1) * (-7 * m**2 * w**2 * q**2 + 8 * m * w**2 * p * q * t - 9 * p**2)
        + 2 * m * w * p * q * _c(3)
        + _s(3) * (m**2 * w**2 * q**2 - p**2)
    )
    xp0_p = _c(1) + _pre(3, 32, -3, -4) * (
        _c(1) * (-(m**2) * w**2 * q**2 - 8 * m * w**2 * p * q * t + p**2)
        + w * _s(1) * (-12 * m**2 * w**2 * q**2 * t + 14 * m * p * q - 4 * p**2 * t)
        + _c(3) * (m**2 * q**2 * w**2 - p**2)
        - 2 * m * w * p * q * _s(3)
    )
    return {"X_t": X_t, "X_q0": (xq0_q, xq0_p), "X_p0": (xp0_q, xp0_p)}


def computed_newton_hook(order: int = 1, n: int = 4) -> dict[str, tuple[TrigPoly, TrigPoly]]:
    """Push the unperturbed Newton-Hook fields through the Magnus map."""
    res = interaction_picture(quartic_interaction(n), MagnusConfig(order=order, exponent=n))
    Fq, Fp = res.q_em0, res.p_em0
    c, s = tp.cos_wt(1), tp.sin_wt(1)
    zero = TrigPoly()
    xt = pushforward_field(zero, zero, Fq, Fp, order, dt=1)
    xq = pushforward_field(c, -(s.scale(1, m=1, w=1)), Fq, Fp, order)
    xp = pushforward_field(s.scale(1, m=-1, w=-1), c, Fq, Fp, order)
    return {"X_t": xt, "X_q0": xq, "X_p0": xp}


def term_diff(a: TrigPoly, b: TrigPoly) -> list[dict]:
    """Terms of ``a - b`` (empty list means an exact match)."""
    return (a - b).to_list()


# -- numerical checks ----------------------------------------------------------
def lifted_field(osc: AnharmonicOscillator, comps: tuple[TrigPoly, TrigPoly], lam: float) -> VectorField:
    """Evolutionary field on ``(t, q, p)`` from TrigPoly components."""
    chart = osc.system().momentum_chart
    cq, cp = comps

    def f(x):
        t, q, p = x
        return [0.0, cq.evaluate(q, p, t, osc.m, osc.omega, lam), cp.evaluate(q, p, t, osc.m, osc.omega, lam)]

    return VectorField(chart, f, name="lifted")


def symmetry_residual(osc: AnharmonicOscillator, comps, lam: float, points) -> float:
    """``max |d(L_Y Theta_PC)|``: zero exactly when ``Y`` is a contact symmetry."""
    o = AnharmonicOscillator(osc.m, osc.omega, lam, osc.n)
    theta = poincare_cartan(o.system(), "momentum")
    Y = lifted_field(o, comps, lam)
    LY = lie_derivative_form(Y, theta)
    return max(float(np.max(np.abs(exterior_derivative(LY, list(x))))) for x in points)


def halving_ratios(errors) -> list[float]:
    return [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]
