import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cartanlab import autodiff as ad
from cartanlab.geometry import Chart, OneForm
from cartanlab.poisson import (Observable, SingularOmega, SMChart, bracket, canonical_chart, chart_from_liouville,
                               compare_tables, hamiltonian_field, interior_omega, poisson_bracket,
                               structure_constants)
from cartanlab.models import S3SigmaModel

CAN = canonical_chart(1)
coef = st.floats(-2, 2, allow_nan=False)
point = st.lists(st.floats(-1, 1), min_size=2, max_size=2)


def poly(c):
    return Observable(CAN, lambda y: c[0] * y[0] + c[1] * y[1] ** 2 + c[2] * y[0] * y[1] + c[3] * y[0] ** 3 * y[1]
                      + c[4] * ad.sin(y[1]))


polys = st.lists(coef, min_size=5, max_size=5)


def test_canonical_normalisation():
    Q = Observable(CAN, lambda y: y[0], "Q")
    P = Observable(CAN, lambda y: y[1], "P")
    assert poisson_bracket(P, Q, [0.3, 0.4]) == 1.0
    assert np.allclose(hamiltonian_field(P)([0.3, 0.4]), [1.0, 0.0])
    assert np.allclose(hamiltonian_field(Q)([0.3, 0.4]), [0.0, -1.0])


@given(polys, point)
def test_self_bracket_vanishes(c, x):
    f = poly(c)
    assert abs(poisson_bracket(f, f, x)) < 1e-12


@given(polys, polys, point)
def test_antisymmetry(a, b, x):
    f, g = poly(a), poly(b)
    assert poisson_bracket(f, g, x) == pytest.approx(-poisson_bracket(g, f, x), abs=1e-9)


@given(polys, polys, polys, point)
def test_leibniz_and_bilinearity(a, b, c, x):
    f, g, h = poly(a), poly(b), poly(c)
    gh = Observable(CAN, lambda y: g(y) * h(y))
    lhs = poisson_bracket(f, gh, x)
    rhs = poisson_bracket(f, g, x) * h(x) + g(x) * poisson_bracket(f, h, x)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    s = Observable(CAN, lambda y: 2 * g(y) - h(y))
    assert poisson_bracket(f, s, x) == pytest.approx(2 * poisson_bracket(f, g, x) - poisson_bracket(f, h, x), abs=1e-9)


@given(polys, polys, polys, point)
def test_jacobi_canonical(a, b, c, x):
    f, g, h = poly(a), poly(b), poly(c)
    J = (poisson_bracket(f, bracket(g, h), x) + poisson_bracket(g, bracket(h, f), x)
         + poisson_bracket(h, bracket(f, g), x))
    assert abs(J) < 1e-7


def test_jacobi_s3_chart(rng):
    model = S3SigmaModel()
    ch = model.sm_chart()
    o = model.observables(ch)
    names = ["eps1", "th2", "rho", "pi3", "H", "J1"]
    for y in model.sm_samples(8, seed=4):
        for a, b, c in ((0, 1, 2), (1, 3, 5), (2, 4, 0)):
            f, g, h = (o[names[k]] for k in (a, b, c))
            J = (poisson_bracket(f, bracket(g, h), y) + poisson_bracket(g, bracket(h, f), y)
                 + poisson_bracket(h, bracket(f, g), y))
            assert abs(J) < 1e-7


def test_hamiltonian_field_contracts_to_minus_df(rng):
    model = S3SigmaModel()
    ch = model.sm_chart()
    f = model.observables(ch)["rho"]
    X = hamiltonian_field(f)
    for y in model.sm_samples(5, seed=1):
        df = ad.jacobian_of(lambda z: [f.f(z)], list(y))[1][0]
        assert np.max(np.abs(interior_omega(ch, X, y) + np.asarray(df, float))) < 1e-10


def test_field_acts_as_bracket(rng):
    f, g = poly([1, 0.5, -1, 0.2, 0.3]), poly([0, 1, 0.4, -0.3, 1])
    x = [0.2, -0.6]
    Xf = hamiltonian_field(f)
    dg = ad.jacobian_of(lambda z: [g.f(z)], x)[1][0]
    assert float(np.dot(Xf(x), np.asarray(dg, float))) == pytest.approx(poisson_bracket(f, g, x))


def test_s3_identity_point_brackets():
    model = S3SigmaModel()
    o = model.observables()
    y = [0.0, 0.0, 0.0, 0.3, -0.2, 0.5]
    B = np.array([[poisson_bracket(o[f"eps{i}"], o[f"th{j}"], y) for j in (1, 2, 3)] for i in (1, 2, 3)])
    # our convention gives {eps^i, th_j} = -delta at the identity
    assert np.allclose(np.abs(B), np.eye(3), atol=1e-14)


def test_rho_field_at_identity_is_zero():
    model = S3SigmaModel()
    Z = model.basic_fields()["Z"]
    assert np.allclose(Z([0, 0, 0, 0.2, 0.1, -0.4]), 0.0, atol=1e-14)


def test_singular_omega_is_reported():
    ch = SMChart(Chart(2, ("a", "b")), lambda x: np.zeros((2, 2)))
    f = Observable(ch, lambda y: y[0])
    with pytest.raises(SingularOmega):
        poisson_bracket(f, f, [0.0, 0.0])


def test_liouville_chart_reproduces_canonical():
    ch = chart_from_liouville(OneForm(Chart(2, ("Q", "P")), lambda y: [y[1], 0.0]))
    assert np.allclose(ch.omega_matrix([0.1, 0.2]), CAN.omega_matrix([0.1, 0.2]))


def test_canonical_table():
    Q = Observable(CAN, lambda y: y[0], "Q")
    P = Observable(CAN, lambda y: y[1], "P")
    pts = [np.array([a, b]) for a, b in np.random.default_rng(0).uniform(-1, 1, (8, 2))]
    tab = structure_constants([P, Q], [P, Q], pts, seed=0)
    assert tab.constants["{P,Q}"] == {"P": 0.0, "Q": 0.0, "1": pytest.approx(1.0)}
    assert tab.max_residual < 1e-12 and tab.closes
    data = json.loads(tab.to_json())
    assert data["seed"] == 0 and data["observables"] == ["P", "Q"]


def test_table_needs_enough_points():
    Q = Observable(CAN, lambda y: y[0], "Q")
    with pytest.raises(ValueError):
        structure_constants([Q, Q], [Q], [np.zeros(2)])


def test_ill_conditioned_basis_warns():
    Q = Observable(CAN, lambda y: y[0], "Q")
    Q2 = Observable(CAN, lambda y: 2 * y[0], "Q2")
    pts = [np.array([a, 0.0]) for a in np.linspace(-1, 1, 6)]
    with pytest.warns(RuntimeWarning):
        structure_constants([Q, Q2], [Q, Q2], pts)


def test_compare_tables_handles_orientation_and_sign():
    Q = Observable(CAN, lambda y: y[0], "Q")
    P = Observable(CAN, lambda y: y[1], "P")
    pts = [np.array(p) for p in np.random.default_rng(1).uniform(-1, 1, (6, 2))]
    tab = structure_constants([P, Q], [P, Q], pts)
    assert compare_tables(tab, {"{Q,P}": {"1": -1.0}})["max_difference"] < 1e-12
    best = compare_tables(tab, {"{P,Q}": {"1": -1.0}}, signs=(1, -1))
    assert best["sign"] == -1 and best["max_difference"] < 1e-12
