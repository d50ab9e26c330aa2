import numpy as np
import pytest
from hypothesis import given, strategies as st

from cartanlab.geometry import ChartError
from cartanlab.models import REGISTRY, S3SigmaModel, RelativisticParticle, get_model, load_fixture
from cartanlab.models.s3 import ETA
from cartanlab.poisson import poisson_bracket

coord = st.floats(-0.5, 0.5)
eps = st.lists(coord, min_size=3, max_size=3)


@given(eps, eps, eps)
def test_group_law_is_associative(a, b, c):
    g = S3SigmaModel()
    lhs = g.compose(g.compose(a, b), c)
    rhs = g.compose(a, g.compose(b, c))
    assert np.allclose(lhs, rhs, atol=1e-12)


@given(eps)
def test_identity_and_inverse(a):
    g = S3SigmaModel()
    assert np.allclose(g.compose(a, [0, 0, 0]), a) and np.allclose(g.compose([0, 0, 0], a), a)
    assert np.allclose(g.compose(a, g.inverse(a)), 0, atol=1e-14)


@given(eps)
def test_coframe_inverts_frame_and_gives_metric(a):
    g = S3SigmaModel(R=3.0)
    X, Th = np.array(g.right_frame(a)), np.array(g.right_coframe(a))
    # X[k][i]: component k of field i; Th[i][j]: component j of form i
    assert np.allclose(Th @ X, np.eye(3), atol=1e-12)
    assert np.allclose(g.metric(a), g.metric_printed(a), atol=1e-12)
    assert np.allclose(np.linalg.inv(g.metric(a)), g.inverse_metric(a), atol=1e-12)


def test_frames_at_identity():
    g = S3SigmaModel()
    assert np.allclose(g.right_frame([0, 0, 0]), np.eye(3))
    assert np.allclose(g.left_frame([0, 0, 0]), -np.eye(3))


def test_symplectic_form_is_maurer_cartan():
    for R in (2.0, 3.0):
        g = S3SigmaModel(R=R)
        y = np.array([0.3, -0.2, 0.4, 0.5, -0.1, 0.7])
        Th, th = np.array(g.right_coframe(list(y[:3]))), y[3:]

        def wedge(a, b):
            return np.outer(a, b) - np.outer(b, a)

        lift = [np.r_[Th[i], 0, 0, 0] for i in range(3)]
        Om = sum(wedge(np.eye(6)[3 + i], lift[i]) for i in range(3))
        Om = Om + sum(0.5 * g.s * ETA[i, j, k] * th[i] * wedge(lift[j], lift[k])
                      for i in range(3) for j in range(3) for k in range(3))
        assert np.allclose(g.sm_chart().omega_matrix(y), Om, atol=1e-14)


def test_chart_boundary():
    g = S3SigmaModel(R=1.0)
    with pytest.raises(ChartError):
        g.compose([0.9, 0, 0], [0, 0.9, 0.5])
    with pytest.raises(ValueError):
        S3SigmaModel(R=0)


def test_geodesic_rest_and_frequency():
    g = S3SigmaModel(R=2.5)
    e, v = g.geodesic([0.1, 0.2, -0.1], [0, 0, 0], 3.0)
    assert np.allclose(e, [0.1, 0.2, -0.1]) and np.allclose(v, 0)
    th = [0.3, -0.4, 0.0]
    assert float(g.frequency(th)) == pytest.approx(0.5 * g.s * 0.5)
    nu = float(g.frequency(th))
    e, v = g.geodesic([0, 0, 0], th, np.pi / (2 * nu) * 0.9)
    assert np.linalg.norm(e) == pytest.approx(0.5 / nu * np.sin(0.45 * np.pi))


def test_geodesic_matches_hamilton_flow():
    g = S3SigmaModel()
    e0, th = [0.2, -0.1, 0.3], [0.4, 0.1, -0.2]
    x = g.numeric_geodesic(e0, th, 1.5)
    e, v = g.geodesic(e0, th, 1.5)
    assert np.allclose(x[1:4], e, atol=1e-10)
    assert np.allclose(g.theta_of(list(x[1:4]), list(x[4:7])), th, atol=1e-10)


def test_relativistic_rest_values():
    rp = RelativisticParticle(m=2.0, c=3.0)
    o = rp.observables()
    y = [0.7, 0.0]
    assert o["K"](y) == pytest.approx(0.7) and o["XX"](y) == pytest.approx(0.7)
    assert o["Pi"](y) == 0.0 and o["Hn"](y) == 0.0 and o["H"](y) == pytest.approx(2.0 * 9.0)
    assert rp.F_K([0.0, 0.7, 0.0]) == pytest.approx(0.7)
    assert rp.F_Q([1.3, 0.7, 0.0]) == pytest.approx(0.7)


def test_relativistic_newtonian_limit():
    rp = RelativisticParticle(m=1.5, c=1e4)
    o = rp.observables()
    y = [0.4, 0.8]
    assert o["Pi"](y) == pytest.approx(0.8, rel=1e-8)
    assert o["Hn"](y) == pytest.approx(0.8**2 / 3.0, rel=1e-6)


def test_newtonised_pair_is_canonical():
    rp = RelativisticParticle(m=1.3, c=0.7)
    o = rp.observables()
    for y in rp.sm_samples(10, seed=2):
        assert poisson_bracket(o["Pi"], o["XX"], y) == pytest.approx(1.0, abs=1e-12)


def test_registry_and_fixtures():
    assert set(REGISTRY) == {"free", "relativistic", "anharmonic", "s3"}
    assert get_model("s3", R=3.0).R == 3.0
    with pytest.raises(KeyError):
        get_model("nope")
    for name in ("s3_algebra", "relativistic_algebra"):
        data = load_fixture(name)
        assert data["version"] == 1
    assert load_fixture("s3_algebra")["constants"]["{eps1,th1}"] == {"rho": 1.0}
    assert set(load_fixture("relativistic_algebra")["galilean"]) == {"{Hn,Pi}", "{Hn,XX}", "{Pi,XX}"}
