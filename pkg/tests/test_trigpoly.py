from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from cartanlab import trigpoly as tp
from cartanlab.trigpoly import T, TrigPoly, X, Y, cos_wt, sin_wt

small = st.integers(-3, 3)


@st.composite
def trigpolys(draw):
    out = TrigPoly()
    for _ in range(draw(st.integers(1, 4))):
        out = out + TrigPoly.monomial(draw(small), m=draw(st.integers(-1, 1)), lam=draw(st.integers(0, 1)),
                                      a=draw(st.integers(0, 3)), b=draw(st.integers(0, 3)),
                                      t=draw(st.integers(0, 2)), h=draw(st.sampled_from(["1", "cos", "sin"])),
                                      k=draw(st.integers(1, 3)))
    return out


def test_normalisation():
    assert tp.poisson(Y, X) == TrigPoly.const(1)
    assert tp.poisson(Y * Y, X * X) == (X * Y).scale(4)


def test_oscillator_brackets():
    H0 = (Y * Y).scale(Fraction(1, 2), m=-1) + (X * X).scale(Fraction(1, 2), m=1, w=2)
    assert tp.poisson(H0, X) == Y.scale(1, m=-1)
    # -m w^2 Q, not the +w^2 Q sometimes quoted for the Newton-Hook table
    assert tp.poisson(H0, Y) == X.scale(-1, m=1, w=2)


@given(trigpolys(), trigpolys())
def test_antisymmetry_exact(f, g):
    assert tp.poisson(f, g) == -tp.poisson(g, f)


@given(trigpolys(), trigpolys(), trigpolys())
def test_leibniz_exact(f, g, h):
    assert tp.poisson(f, g * h) == tp.poisson(f, g) * h + g * tp.poisson(f, h)


@given(trigpolys(), trigpolys(), trigpolys())
def test_jacobi_exact(f, g, h):
    J = tp.poisson(f, tp.poisson(g, h)) + tp.poisson(g, tp.poisson(h, f)) + tp.poisson(h, tp.poisson(f, g))
    assert not J


@given(trigpolys())
def test_derivative_undoes_integral(f):
    assert tp.d_time(tp.integrate_time(f)) == f


@given(trigpolys(), st.floats(0.1, 3), st.floats(0.5, 2))
def test_integral_vanishes_at_zero_and_matches_quadrature(f, t, w):
    F = tp.integrate_time(f)
    assert F.evaluate(0.3, -0.4, 0.0, 1.2, w, 0.7) == pytest.approx(0.0, abs=1e-12)
    s = np.linspace(0.0, t, 2001)
    vals = np.array([f.evaluate(0.3, -0.4, si, 1.2, w, 0.7) for si in s])
    quad = float(np.sum((vals[1:] + vals[:-1]) * np.diff(s)) / 2)
    assert F.evaluate(0.3, -0.4, t, 1.2, w, 0.7) == pytest.approx(quad, rel=1e-5, abs=1e-6)


def test_integral_examples():
    assert tp.integrate_time(TrigPoly.const(1)) == T
    assert tp.integrate_time(cos_wt()) == sin_wt().scale(1, w=-1)
    expect = sin_wt().scale(1, w=-2) - (T * cos_wt()).scale(1, w=-1)
    assert tp.integrate_time(T * sin_wt()) == expect


def test_bernoulli_recurrence_and_sympy():
    assert tp.bernoulli(0) == 1 and tp.bernoulli(1) == Fraction(-1, 2)
    assert tp.bernoulli(2) == Fraction(1, 6) and tp.bernoulli(3) == 0
    assert tp.bernoulli(12) == Fraction(-691, 2730)
    for n in range(2, 21):
        ref = sympy.bernoulli(n)
        assert tp.bernoulli(n) == Fraction(int(ref.p), int(ref.q))
    with pytest.raises(ValueError):
        tp.bernoulli(-1)


def test_substitute_and_power():
    f = X * X * Y + T
    g = tp.substitute(f, X + Y, Y)
    assert g == (X + Y) * (X + Y) * Y + T
    assert tp.power(X + Y, 3) == (X + Y) * (X + Y) * (X + Y)


def test_harmonic_products_reduce():
    # cos^2 = (1 + cos 2)/2
    c2 = cos_wt() * cos_wt()
    assert c2 == TrigPoly.const(Fraction(1, 2)) + cos_wt(2).scale(Fraction(1, 2))
    assert sin_wt() * cos_wt() == sin_wt(2).scale(Fraction(1, 2))


def test_truncation_flag():
    lam = TrigPoly.const(1, lam=1)
    f = tp.multiply(lam * X, lam * Y, order=1)
    assert not f and f.truncated
    assert (lam * lam * X).truncate(1).truncated


def test_serialisation_round_trip():
    f = (X * Y * T * cos_wt(3)).scale(Fraction(-5, 7), m=-2, w=1, lam=1) + Y
    assert TrigPoly.from_list(f.to_list()) == f
    assert "cos" in f.pretty()


def test_evaluate_matches_symbols():
    f = (X * Y * T * sin_wt(2)).scale(3, m=-1, w=2, lam=1)
    assert f.evaluate(0.5, 2.0, 0.7, 2.0, 1.5, 0.1) == pytest.approx(3 * 0.5 * 2 * 0.7 * np.sin(2.1) * 1.5**2 / 2 * 0.1)
