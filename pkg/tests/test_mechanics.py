import math

import numpy as np
import pytest

from cartanlab.geometry import VectorField, coordinate_field
from cartanlab.mechanics import (EvolutionPoint, LagrangianSystem, SampleSpec, SingularLegendre, SymmetryCandidate,
                                 check_contact_symmetry, euler_lagrange_residual, evolution_field,
                                 interior_d, inverse_legendre, kernel_residual, lagrangian_form, legendre,
                                 momenta, noether_invariant, poincare_cartan)
from cartanlab.flows import FlowSpec, integrate
from cartanlab.models import AnharmonicOscillator, FreeParticle, RelativisticParticle, S3SigmaModel


def test_free_momentum():
    sys = FreeParticle(2.0).system()
    assert momenta(sys, [0.0, 0.0, 3.0])[0] == pytest.approx(6.0)


def test_relativistic_momentum():
    p = momenta(RelativisticParticle().system(), EvolutionPoint(0.0, (0.0,), (0.6,), "velocity"))
    assert p[0] == pytest.approx(0.75, abs=1e-14)


def test_momenta_rejects_momentum_points():
    with pytest.raises(ValueError):
        momenta(FreeParticle().system(), EvolutionPoint(0.0, (0.0,), (1.0,), "momentum"))


def test_s3_momenta_are_metric_contractions(rng):
    model = S3SigmaModel()
    sys = model.system()
    for _ in range(10):
        e, v = rng.uniform(-0.5, 0.5, 3), rng.uniform(-1, 1, 3)
        p = momenta(sys, np.concatenate([[0.0], e, v]))
        assert np.max(np.abs(p - np.array(model.metric_printed(list(e))) @ v)) < 1e-12


def test_singular_lagrangian_is_detected():
    sys = LagrangianSystem(1, lambda t, q, v: v[0], name="linear")
    with pytest.raises(SingularLegendre):
        momenta(sys, [0.0, 0.0, 1.0], require_inversion=True)


def test_legendre_round_trip(rng):
    for model in (RelativisticParticle(), AnharmonicOscillator(lam=0.1)):
        sys = model.system()
        for _ in range(10):
            x = np.array([rng.uniform(0, 1), rng.uniform(-1, 1), rng.uniform(-0.8, 0.8)])
            assert np.max(np.abs(inverse_legendre(sys, legendre(sys, x)) - x)) < 1e-12


def test_legendre_inverse_by_newton_without_hamiltonian():
    sys = LagrangianSystem(1, lambda t, q, v: -(1 - v[0] ** 2) ** 0.5)
    x = np.array([0.0, 0.1, 0.5])
    assert np.allclose(inverse_legendre(sys, legendre(sys, x)), x, atol=1e-12)


def test_pc_components_free_particle():
    th = poincare_cartan(FreeParticle(1.0).system())
    assert np.allclose(th([0.0, 0.0, 2.0]), [-2.0, 2.0, 0.0])


def test_pc_time_component_relativistic():
    th = poincare_cartan(RelativisticParticle().system())
    assert th([0.0, 0.0, 0.6])[0] == pytest.approx(-1.25)


def test_pc_on_evolution_field_is_lagrangian_for_geodesics(rng):
    model = S3SigmaModel()
    sys = model.system()
    th = poincare_cartan(sys, "velocity")
    X = evolution_field(sys, "velocity")
    for _ in range(5):
        x = np.concatenate([[0.0], rng.uniform(-0.5, 0.5, 3), rng.uniform(-1, 1, 3)])
        assert float(th(x) @ X(x)) == pytest.approx(sys.L(x), abs=1e-10)


def test_evolution_field_examples():
    osc = AnharmonicOscillator(lam=0.0)
    assert np.allclose(evolution_field(osc.system())([0.0, 1.0, 0.0]), [1.0, 0.0, -1.0])
    osc = AnharmonicOscillator(lam=0.1)
    assert evolution_field(osc.system())([0.0, 1.0, 0.0])[2] == pytest.approx(-1.1)
    rel = RelativisticParticle()
    p = 0.8
    assert evolution_field(rel.system())([0.0, 0.0, p])[1] == pytest.approx(p / math.sqrt(p * p + 1))


@pytest.mark.parametrize("name", ["free", "relativistic", "anharmonic", "s3"])
def test_evolution_field_spans_kernel(name, rng):
    model = {"free": FreeParticle(), "relativistic": RelativisticParticle(),
             "anharmonic": AnharmonicOscillator(lam=0.2), "s3": S3SigmaModel()}[name]
    sys = model.system()
    worst = 0.0
    for _ in range(100):
        x = np.concatenate([[rng.uniform(0, 2)], rng.uniform(-0.5, 0.5, sys.n), rng.uniform(-0.8, 0.8, sys.n)])
        worst = max(worst, kernel_residual(sys, x))
    assert worst < 1e-10


def test_velocity_chart_kernel_agrees(rng):
    sys = RelativisticParticle().system()
    th = poincare_cartan(sys, "velocity")
    X = evolution_field(sys, "velocity")
    for _ in range(10):
        x = [rng.uniform(0, 1), rng.uniform(-1, 1), rng.uniform(-0.9, 0.9)]
        assert np.max(np.abs(interior_d(th, X, x))) < 1e-10


def test_noether_translation_and_boost():
    sys = FreeParticle(1.5).system()
    ch = sys.velocity_chart
    F = noether_invariant(sys, SymmetryCandidate(coordinate_field(ch, 1)))
    assert F([0.3, 1.0, 2.0]) == pytest.approx(3.0)
    boost = VectorField(ch, lambda x: [0.0, x[0], 1.0])  # t d/dq prolonged
    G = noether_invariant(sys, SymmetryCandidate(boost, lambda x: 1.5 * x[1]))
    t, q, v = 2.0, 0.4, 1.2
    p = 1.5 * v
    assert G([t, q, v]) == pytest.approx(-1.5 * (q - p * t / 1.5))


def test_relativistic_x_q_invariant_is_position_invariant(rng):
    model = RelativisticParticle()
    F = noether_invariant(model.system(), model.x_q_candidate())
    for _ in range(5):
        x = [rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.9, 0.9)]
        assert F(x) == pytest.approx(model.F_Q(x), abs=1e-12)


def test_contact_checker_verdicts():
    free = FreeParticle().system()
    sp = SampleSpec(lambda r: r.uniform(-1, 1, 3), n=10, seed=3)
    rep = check_contact_symmetry(free, SymmetryCandidate(coordinate_field(free.velocity_chart, 1)), sp)
    assert rep.is_symmetry and rep.max_residual == 0.0

    model = RelativisticParticle()
    sys = model.system()
    pts = [[0.2 * k, 0.1 - 0.05 * k, 0.15 * k - 0.4] for k in range(8)]
    good = check_contact_symmetry(sys, model.x_q_candidate(), pts, trajectories=pts[:2])
    assert good.is_symmetry and good.conservation_drift < 1e-8
    bad = check_contact_symmetry(sys, model.x_q_candidate(), pts, form=lagrangian_form(sys))
    assert not bad.is_symmetry and bad.max_residual > 0.1


def test_el_residual_free_line_and_anharmonic():
    free = FreeParticle().system()
    assert euler_lagrange_residual(free, [(t, [1 + 2 * t], [2.0], [0.0]) for t in (0.0, 1.0, 3.0)]) == 0.0
    osc = AnharmonicOscillator(lam=0.3)
    sys = osc.system()
    X = evolution_field(sys)
    times = np.linspace(0, 3, 7)
    _, traj = integrate(X, [0.0, 1.0, 0.2], 3.0, FlowSpec(atol=1e-10, rtol=1e-10), sample_times=times)
    samples = []
    for t, q, p in traj:
        v = p / osc.m
        a = -(osc.m * osc.omega**2 * q + osc.lam * q**3) / osc.m
        samples.append((t, [q], [v], [a]))
    assert euler_lagrange_residual(sys, samples) < 1e-7
