"""Magnus series and the interaction picture on trigonometric polynomials.

Conventions (checked against the unperturbed closed form):

* bracket ``{f, g} = f_P g_Q - f_Q g_P``;
* the Magnus exponent is carried as a function ``W(t) = int_0^t (-H)``;
* it acts on observables through ``ad_W F = {F, W}``, so
  ``F(t) = sum_j ad_W^j F / j!`` sends ``Q`` to the solution ``q(t; Q, P)``.

Because ``W -> ad_W`` reverses brackets, the nested terms of the recursion
read ``ad~_W(A) = {A, W}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import trigpoly as tp
from .trigpoly import TrigPoly, X, Y, cos_wt, sin_wt, T

__all__ = [
    "MagnusConfig",
    "magnus_omega",
    "evolve_observable",
    "evolve_time_independent",
    "harmonic_h0",
    "harmonic_inverse_hj",
    "harmonic_hj",
    "free_inverse_hj",
    "free_hj",
    "quartic_interaction",
    "interaction_picture",
    "InteractionResult",
    "invert_map",
    "pushforward_field",
]


@dataclass(frozen=True)
class MagnusConfig:
    """``order``: truncation in ``lam``; ``exponent``: ``n`` in ``lam q^n / n``."""

    order: int = 1
    exponent: int = 4
    bernoulli_b1: Fraction = Fraction(-1, 2)
    ad_sign: str = "bracket(F,W)"

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Magnus truncation order must be >= 1")
        if self.exponent < 1:
            raise ValueError("interaction exponent must be positive")
        if self.bernoulli_b1 != Fraction(-1, 2):
            raise ValueError("only the B_1 = -1/2 convention is implemented")


def _ad(W: TrigPoly, F: TrigPoly, order: int) -> TrigPoly:
    return tp.poisson(F, W, order)


def magnus_omega(H_t: TrigPoly, cfg: MagnusConfig) -> TrigPoly:
    """Magnus exponent of the time-dependent ``H_t`` (which must be ``O(lam)``)."""
    if any(k[2] == 0 for k, _ in H_t):
        raise ValueError("generator must be of positive lam-degree")
    N = cfg.order
    minus_h = -H_t
    W = TrigPoly()
    for _ in range(N):
        nxt = TrigPoly()
        term = minus_h
        for k in range(N):
            if k:
                term = _ad(W, term, N)
            if not term:
                break
            B = tp.bernoulli(k)
            if B:
                nxt = nxt + tp.integrate_time(term).scale(B / factorial(k))
        W = nxt.truncate(N)
    return W


def evolve_observable(F0: TrigPoly, W: TrigPoly, cfg: MagnusConfig) -> TrigPoly:
    """``exp(ad_W) F0`` truncated at ``lam^N``; the series stops on its own."""
    N = cfg.order
    out, term = F0, F0
    for j in range(1, N + 1):
        term = _ad(W, term, N).scale(Fraction(1, j))
        if not term:
            break
        out = out + term
    return out.truncate(N)


def evolve_time_independent(F0: TrigPoly, H: TrigPoly, t_order: int = 8) -> TrigPoly:
    """``sum_k (-t)^k/k! {...{F0, H}..., H}`` summed to ``t^t_order``.

    A time-independent ``H`` of degree two is summed to all orders instead:
    the action on ``(Q, P)`` is linear with matrix ``A`` and ``A^2 = -w^2``
    (harmonic) or ``A^2 = 0`` (free), so the flow closes on ``cos``/``sin``.
    """
    closed = _linear_flow(H)
    if closed is not None:
        return tp.substitute(F0, *closed)
    out, term = F0, F0
    for k in range(1, t_order + 1):
        term = (tp.poisson(term, H) * T).scale(Fraction(-1, k))
        out = out + term
    return out


def _linear_flow(H: TrigPoly):
    if any(k[5] or k[6] != tp.ONE or k[3] + k[4] != 2 for k, _ in H):
        return None
    aQ, aP = -tp.poisson(X, H), -tp.poisson(Y, H)  # images of Q, P under -{., H}
    A2Q, A2P = tp.substitute(aQ, aQ, aP), tp.substitute(aP, aQ, aP)
    if not A2Q and not A2P:
        return X + aQ * T, Y + aP * T
    wsq = TrigPoly.const(-1, w=2)
    if A2Q == wsq * X and A2P == wsq * Y:
        c, s = cos_wt(), sin_wt().scale(1, w=-1)
        return X * c + aQ * s, Y * c + aP * s
    return None


# -- unperturbed closed forms -----------------------------------------------
def harmonic_h0() -> TrigPoly:
    """``P^2 / 2m + m w^2 Q^2 / 2``."""
    return (Y * Y).scale(Fraction(1, 2), m=-1) + (X * X).scale(Fraction(1, 2), m=1, w=2)


def harmonic_inverse_hj():
    """``(q0, p0)`` as functions of ``(Q, P, t)``."""
    c, s = cos_wt(), sin_wt()
    return X * c + (Y * s).scale(1, m=-1, w=-1), Y * c - (X * s).scale(1, m=1, w=1)


def harmonic_hj():
    """``(Q, P)`` as functions of ``(q0, p0, t)``."""
    c, s = cos_wt(), sin_wt()
    return X * c - (Y * s).scale(1, m=-1, w=-1), Y * c + (X * s).scale(1, m=1, w=1)


def free_inverse_hj():
    return X + (Y * T).scale(1, m=-1), Y


def free_hj():
    return X - (Y * T).scale(1, m=-1), Y


def quartic_interaction(n: int = 4) -> TrigPoly:
    """``lam Q^n / n``."""
    return TrigPoly.monomial(Fraction(1, n), lam=1, a=n)


@dataclass
class InteractionResult:
    q_em0: TrigPoly
    p_em0: TrigPoly
    q_sm: TrigPoly
    p_sm: TrigPoly
    omega: TrigPoly
    h_interaction: TrigPoly
    truncated: bool


def interaction_picture(H_I: TrigPoly, cfg: MagnusConfig, kind: str = "harmonic") -> InteractionResult:
    """Two-step construction of the perturbed solutions.

    ``H_I`` is written in the solution-manifold slots ``(Q, P)``.  It is
    pulled to the unperturbed evolution manifold ``(t, q0, p0)``, the Magnus
    exponent of the resulting time-dependent generator is applied to
    ``q0, p0``, and the result is also re-expressed through ``(Q, P)``.
    """
    if kind == "harmonic":
        to_sm, to_em0 = harmonic_hj(), harmonic_inverse_hj()
    elif kind == "free":
        to_sm, to_em0 = free_hj(), free_inverse_hj()
    else:
        raise ValueError(f"unknown unperturbed system {kind!r}")
    H_t = tp.substitute(H_I, *to_sm, order=cfg.order)
    W = magnus_omega(H_t, cfg)
    q = evolve_observable(X, W, cfg)
    p = evolve_observable(Y, W, cfg)
    q_sm = tp.substitute(q, *to_em0, order=cfg.order)
    p_sm = tp.substitute(p, *to_em0, order=cfg.order)
    flag = any(f.truncated for f in (q, p, q_sm, p_sm))
    return InteractionResult(q, p, q_sm, p_sm, W, H_t, flag)


def invert_map(Fq: TrigPoly, Fp: TrigPoly, order: int):
    """Inverse of ``(x, y) -> (Fq, Fp)`` where ``F = id + O(lam)``.

    Fixed-point iteration ``x0 <- x - (F(x0) - x0)``; each pass gains one
    order in ``lam``.
    """
    dq, dp = Fq - X, Fp - Y
    a, b = X, Y
    for _ in range(order):
        a, b = X - tp.substitute(dq, a, b, order), Y - tp.substitute(dp, a, b, order)
    return a.truncate(order), b.truncate(order)


def pushforward_field(comp_q0: TrigPoly, comp_p0: TrigPoly, Fq: TrigPoly, Fp: TrigPoly, order: int, *,
                      dt: int = 0):
    """Push ``dt * d/dt + comp_q0 d/dq0 + comp_p0 d/dp0`` through ``(Fq, Fp)``.

    Returns the ``d/dq`` and ``d/dp`` components as functions of the image
    coordinates ``(q, p, t)``.
    """
    def push(F):
        out = tp.multiply(comp_q0, tp.d_slot(F, 0), order) + tp.multiply(comp_p0, tp.d_slot(F, 1), order)
        if dt:
            out = out + tp.d_time(F).scale(dt)
        return out

    inv = invert_map(Fq, Fp, order)
    return (tp.substitute(push(Fq), *inv, order=order).truncate(order),
            tp.substitute(push(Fp), *inv, order=order).truncate(order))
