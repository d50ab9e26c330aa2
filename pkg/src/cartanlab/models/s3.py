"""Particle on SU(2) ~ S^3 (the simplest non-linear sigma model).

Coordinates ``eps`` with ``|eps| = 2 sin(phi/2)`` at the unit normalization
``R = 2``.  A general radius enters through ``eps -> (2/R) eps``: every
formula below is written with ``s = 2/R`` and reduces to the printed one at
``s = 1``.

Matrix conventions: ``Xm[k][i] = X^k_(i)`` (column ``i`` is the i-th
right-invariant field) and ``Th[i][j] = theta^(i)_j``, so ``Th @ Xm = 1``.
Momenta and Noether invariants are related by ``vartheta = Xm^T p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .. import autodiff as ad
from ..flows import FlowSpec, HJMap, integrate, hamilton_rhs, lift_symmetry
from ..geometry import Chart, ChartError, OneForm, VectorField
from ..mechanics import LagrangianSystem
from ..poisson import Observable, SMChart, chart_from_liouville, hamiltonian_field, poisson_bracket, structure_constants


def _levi_civita():
    eta = np.zeros((3, 3, 3))
    for perm in permutations(range(3)):
        sign = np.linalg.det(np.eye(3)[list(perm)])
        eta[perm] = sign
    return eta


ETA = _levi_civita()  # ETA[1-1, 2-1, 3-1] = +1


def _cross(a, b):
    """``eta^i_jk a^j b^k``."""
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _matvec(M, v):
    return [M[i][0] * v[0] + M[i][1] * v[1] + M[i][2] * v[2] for i in range(3)]


def _matTvec(M, v):
    return [M[0][j] * v[0] + M[1][j] * v[1] + M[2][j] * v[2] for j in range(3)]


@dataclass(frozen=True)
class S3SigmaModel:
    R: float = 2.0
    margin: float = 1e-6
    spec: FlowSpec = field(default=FlowSpec(atol=1e-12, rtol=1e-12))

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("radius must be positive")

    @property
    def s(self) -> float:
        return 2.0 / self.R

    @property
    def eps_max(self) -> float:
        return self.R * (1 - self.margin)

    def inside(self, eps) -> bool:
        return float(np.sqrt(sum(ad.primal(e) ** 2 for e in eps))) < self.eps_max

    def _require(self, eps):
        if not self.inside(eps):
            raise ChartError(f"|eps| must stay below {self.eps_max:g}")

    # -- group structure ----------------------------------------------------
    def rho(self, eps):
        s = self.s
        return ad.sqrt(1 - s * s * _dot(eps, eps) / 4)

    def compose(self, e1, e2):
        """Group law ``eps'' = f(eps', eps)``."""
        self._require(e1)
        self._require(e2)
        s = self.s
        r1, r2 = self.rho(e1), self.rho(e2)
        c = _cross(e1, e2)
        out = [r2 * e1[i] + r1 * e2[i] + 0.5 * s * c[i] for i in range(3)]
        self._require(out)
        return out

    def inverse(self, e):
        return [-v for v in e]

    def right_frame(self, eps):
        """``Xm[k][i] = rho delta + (s/2) eta^k_im eps^m``."""
        r, h = self.rho(eps), 0.5 * self.s
        return [[(r if k == i else 0.0) + h * sum(ETA[k, i, m] * eps[m] for m in range(3)) for i in range(3)]
                for k in range(3)]

    def left_frame(self, eps):
        """Left-invariant generators, oriented so that ``X^L_(i) = -d/deps^i`` at the identity.

        With this orientation ``J - kappa`` is the left Noether invariant.
        """
        r, h = self.rho(eps), 0.5 * self.s
        return [[-(r if k == i else 0.0) + h * sum(ETA[k, i, m] * eps[m] for m in range(3)) for i in range(3)]
                for k in range(3)]

    def right_coframe(self, eps):
        """``Th[i][j] = rho delta + s^2 eps^i eps_j / (4 rho) - (s/2) eta^i_jk eps^k``."""
        r, s = self.rho(eps), self.s
        return [[(r if i == j else 0.0) + s * s * eps[i] * eps[j] / (4 * r)
                 - 0.5 * s * sum(ETA[i, j, k] * eps[k] for k in range(3)) for j in range(3)] for i in range(3)]

    def metric(self, eps):
        """``g = theta^T theta`` (computed from the coframe)."""
        Th = self.right_coframe(eps)
        return [[sum(Th[r][i] * Th[r][j] for r in range(3)) for j in range(3)] for i in range(3)]

    def metric_printed(self, eps):
        """``delta + s^2 eps eps / (4 (1 - s^2 eps^2 / 4))``."""
        s = self.s
        d = 4 * (1 - s * s * _dot(eps, eps) / 4)
        return [[(1.0 if i == j else 0.0) + s * s * eps[i] * eps[j] / d for j in range(3)] for i in range(3)]

    def inverse_metric(self, eps):
        s = self.s
        return [[(1.0 if i == j else 0.0) - s * s * eps[i] * eps[j] / 4 for j in range(3)] for i in range(3)]

    # -- evolution manifold -----------------------------------------------------
    def system(self) -> LagrangianSystem:
        def lag(t, q, v):
            g = self.metric_printed(q)
            return 0.5 * sum(g[i][j] * v[i] * v[j] for i in range(3) for j in range(3))

        def ham(t, q, p):
            gi = self.inverse_metric(q)
            return 0.5 * sum(gi[i][j] * p[i] * p[j] for i in range(3) for j in range(3))

        valid = lambda x: self.inside(x[1:4])
        return LagrangianSystem(3, lag, ham, velocity_valid=valid, momentum_valid=valid,
                                qnames=("e1", "e2", "e3"), name="s3")

    def hamiltonian(self, t, q, p):
        gi = self.inverse_metric(q)
        return 0.5 * sum(gi[i][j] * p[i] * p[j] for i in range(3) for j in range(3))

    def theta_of(self, eps, p):
        """``vartheta_i = X^k_(i) p_k``."""
        return _matTvec(self.right_frame(eps), p)

    def momenta_of(self, eps, theta):
        """Inverse of :meth:`theta_of`: ``p = Th^T vartheta``."""
        return _matTvec(self.right_coframe(eps), theta)

    def frequency(self, theta):
        """Angular frequency ``s |vartheta| / 2`` of the great circle."""
        return 0.5 * self.s * ad.sqrt(_dot(theta, theta))

    def geodesic(self, eps0, theta, t):
        """``(eps(t), eps_dot(t))``; ``vartheta`` is constant along it."""
        self._require(eps0)
        vel0 = _matvec(self.right_frame(eps0), theta)  # g^{-1} p = Xm vartheta
        nu2 = self.s * self.s * _dot(theta, theta) / 4
        u = nu2 * t * t
        c, sc = ad.cos_sqrt(u), ad.sinc_sqrt(u)  # sin(nu t)/(nu t)
        eps = [eps0[i] * c + vel0[i] * t * sc for i in range(3)]
        vel = [vel0[i] * c - eps0[i] * nu2 * t * sc for i in range(3)]
        if not self.inside(eps):
            raise ChartError(f"geodesic leaves the chart before t={ad.primal(t):g}")
        return eps, vel

    def hj(self) -> HJMap:
        def init(y):
            return list(y[:3]) + self.momenta_of(y[:3], y[3:])

        def init_inv(z):
            return list(z[:3]) + self.theta_of(z[:3], z[3:])

        def closed(y, s):
            eps, vel = self.geodesic(y[:3], y[3:], s)
            g = self.metric_printed(eps)
            return eps + _matvec(g, vel)

        def closed_inv(x):
            t, eps, p = x[0], x[1:4], x[4:7]
            th = self.theta_of(eps, p)
            vel = _matvec(self.inverse_metric(eps), p)
            nu2 = self.s * self.s * _dot(th, th) / 4
            u = nu2 * t * t
            c, sc = ad.cos_sqrt(u), ad.sinc_sqrt(u)
            eps0 = [eps[i] * c - vel[i] * t * sc for i in range(3)]
            return eps0 + th

        chart = Chart(6, ("e1", "e2", "e3", "th1", "th2", "th3"), lambda y: self.inside(y[:3]), "s3:SM")
        return HJMap(H=self.hamiltonian, n=3, init=init, init_inverse=init_inv, closed_form=closed,
                     closed_inverse=closed_inv, spec=self.spec, sm_chart=chart,
                     em_chart=self.system().momentum_chart)

    def numeric_geodesic(self, eps0, theta, duration, times=None):
        p0 = self.momenta_of(eps0, theta)
        return integrate(hamilton_rhs(self.hamiltonian, 3), [0.0] + list(eps0) + list(p0), duration,
                         self.spec, sample_times=times)

    # -- solution manifold --------------------------------------------------------
    def sm_chart(self) -> SMChart:
        chart = Chart(6, ("e1", "e2", "e3", "th1", "th2", "th3"), lambda y: self.inside(y[:3]), "s3:SM")
        liou = OneForm(chart, lambda y: self.momenta_of(y[:3], y[3:]) + [0.0, 0.0, 0.0], name="Lambda")
        return chart_from_liouville(liou)

    def observables(self, chart: SMChart | None = None) -> dict[str, Observable]:
        ch = chart or self.sm_chart()
        obs = {}
        for i in range(3):
            obs[f"eps{i + 1}"] = Observable(ch, lambda y, i=i: y[i], f"eps{i + 1}")
            obs[f"th{i + 1}"] = Observable(ch, lambda y, i=i: y[3 + i], f"th{i + 1}")
        obs["rho"] = Observable(ch, lambda y: self.rho(y[:3]), "rho")

        def pi(y):
            return self.momenta_of(y[:3], y[3:])

        for i in range(3):
            obs[f"pi{i + 1}"] = Observable(ch, lambda y, i=i: pi(y)[i], f"pi{i + 1}")
            obs[f"J{i + 1}"] = Observable(ch, lambda y, i=i: 0.5 * self.s * _cross(y[:3], pi(y))[i], f"J{i + 1}")
            obs[f"kappa{i + 1}"] = Observable(ch, lambda y, i=i: self.rho(y[:3]) * pi(y)[i], f"kappa{i + 1}")
            obs[f"thL{i + 1}"] = Observable(
                ch, lambda y, i=i: _matTvec(self.left_frame(y[:3]), pi(y))[i], f"thL{i + 1}")
        obs["H"] = Observable(ch, lambda y: 0.5 * _dot(y[3:], y[3:]), "H")
        return obs

    def sm_samples(self, n=16, seed=0, eps_radius=0.6, theta_radius=1.0):
        """Points with ``|eps| <= eps_radius * R/2`` and ``|vartheta_i| <= theta_radius``."""
        rng = np.random.default_rng(seed)
        pts = []
        while len(pts) < n:
            e = rng.uniform(-1, 1, 3)
            if np.linalg.norm(e) > 1:
                continue
            pts.append(np.concatenate([e * eps_radius * self.R / 2, rng.uniform(-theta_radius, theta_radius, 3)]))
        return pts

    def basic_fields(self, chart: SMChart | None = None) -> dict[str, VectorField]:
        """Hamiltonian fields of ``vartheta_i`` (X_i), ``eps_j`` (Y_j) and ``rho`` (Z)."""
        ch = chart or self.sm_chart()
        o = self.observables(ch)
        out = {f"X{i + 1}": hamiltonian_field(o[f"th{i + 1}"]) for i in range(3)}
        out.update({f"Y{j + 1}": hamiltonian_field(o[f"eps{j + 1}"]) for j in range(3)})
        out["Z"] = hamiltonian_field(o["rho"])
        return out

    def algebra_table(self, points, chart=None):
        o = self.observables(chart)
        names = [o[k] for k in ("eps1", "eps2", "eps3", "th1", "th2", "th3", "rho")]
        return structure_constants(names, names, points, tol=1e-7)

    def e4_table(self, points, chart=None):
        o = self.observables(chart)
        names = [o[k] for k in ("J1", "J2", "J3", "kappa1", "kappa2", "kappa3")]
        return structure_constants(names, names, points, tol=1e-7)

    # -- lifted fields ----------------------------------------------------------
    def lift(self, field_: VectorField, method=None) -> VectorField:
        return lift_symmetry(self.hj(), field_, method=method)

    def to_theta_components(self, Y: VectorField, x):
        """Components of an EM field at ``x = (t, eps, p)`` in the ``(eps, vartheta)`` frame."""
        v = Y(x)
        _, J = ad.jacobian_of(lambda z: self.theta_of(z[1:4], z[4:7]), list(x))
        J = np.asarray(J, dtype=float)
        return np.concatenate([v[1:4], J @ v])

    def y_printed(self, j: int, x, eps0=None, omega: str = "printed"):
        """Literal transcription of the printed lifted ``Y_(j)`` in the ``(eps, theta)`` frame.

        ``omega='printed'`` uses ``sqrt(2H)``; ``'geodesic'`` uses the actual
        frequency.  ``eps0`` defaults to the point's own initial value.
        """
        t, eps, p = x[0], list(x[1:4]), list(x[4:7])
        th = self.theta_of(eps, p)
        if eps0 is None:
            eps0 = self.hj().closed_inverse(list(x))[:3]
        w = ad.sqrt(_dot(th, th)) if omega == "printed" else self.frequency(th)
        Xe, X0 = self.right_frame(eps), self.right_frame(eps0)
        Xth = _matvec(Xe, th)    # X^n_(s) theta^s
        X0th = _matvec(X0, th)   # X_(r)j(eps0) theta^r
        sn, cs = np.sin(w * t), np.cos(w * t)
        comp_e = []
        for n in range(3):
            a = (1.0 if n == j else 0.0) - 0.25 * eps[j] * eps[n] - Xth[j] * Xth[n] / (4 * w**4)
            comp_e.append((a * sn + Xth[n] * X0th[j] * t / (4 * w)) / w)
        comp_t = []
        cr = _cross([1.0 if k == j else 0.0 for k in range(3)], Xth)  # eta^n_jm (X theta)^m
        for n in range(3):
            b = 0.5 * cr[n] + (0.25 * _dot(th, eps) if n == j else 0.0)
            comp_t.append(Xe[j][n] * cs + b * sn / w)
        return np.array(comp_e + comp_t, dtype=float)


def contraction_scan(R_values, *, n_points=12, seed=0, eps_window=0.5, theta_window=1.0):
    """Deviations from Heisenberg-Weyl brackets at physical ``|eps| <= eps_window``.

    Heisenberg-Weyl values in this sign convention: ``{eps^i, th_j} = -delta``,
    all other brackets zero (and the field of ``rho`` vanishes).
    """
    rows = []
    for R in R_values:
        model = S3SigmaModel(R=R)
        ch = model.sm_chart()
        o = model.observables(ch)
        rng = np.random.default_rng(seed)
        pts = []
        while len(pts) < n_points:
            e = rng.uniform(-1, 1, 3)
            if np.linalg.norm(e) <= 1:
                pts.append(np.concatenate([e * eps_window, rng.uniform(-theta_window, theta_window, 3)]))
        eps = [o[f"eps{i}"] for i in (1, 2, 3)]
        th = [o[f"th{i}"] for i in (1, 2, 3)]
        sym = anti = rt = tt = 0.0
        for y in pts:
            B = np.array([[poisson_bracket(eps[i], th[j], y) for j in range(3)] for i in range(3)])
            D = B + np.eye(3)
            sym = max(sym, float(np.max(np.abs(0.5 * (D + D.T)))))
            anti = max(anti, float(np.max(np.abs(0.5 * (D - D.T)))))
            rt = max(rt, max(abs(poisson_bracket(o["rho"], th[k], y)) for k in range(3)))
            tt = max(tt, max(abs(poisson_bracket(th[i], th[j], y)) for i in range(3) for j in range(i + 1, 3)))
        Z = hamiltonian_field(o["rho"])
        znorm = max(float(np.linalg.norm(Z(y))) for y in pts)
        rows.append({"R": float(R), "eps_th_sym": sym, "eps_th_anti": anti, "rho_th": rt, "th_th": tt,
                     "Z_norm": znorm})
    return rows


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def x_printed(model: S3SigmaModel, i: int, x):
    """Printed lifted ``X_(i)``: ``X^k_(i) d/deps^k + eta^k_ij theta^j d/dtheta^k``."""
    eps, p = list(x[1:4]), list(x[4:7])
    th = model.theta_of(eps, p)
    Xe = model.right_frame(eps)
    comp_e = [Xe[k][i] for k in range(3)]
    comp_t = [model.s * sum(ETA[k, i, j] * th[j] for j in range(3)) for k in range(3)]
    return np.array(comp_e + comp_t, dtype=float)


def compare_printed_lifts(model: S3SigmaModel, points, tol: float = 1e-7) -> dict:
    """Lifted basic fields against their printed closed forms, block by block.

    For every field the ``eps`` and ``theta`` blocks are compared separately,
    with either overall sign and (for ``Y``) both readings of the frequency.
    A block "matches" when some variant agrees within ``tol``.
    """
    ch = model.sm_chart()
    F = model.basic_fields(ch)
    out = {}
    for name in ("X1", "X2", "X3", "Y1", "Y2", "Y3"):
        lifted = model.lift(F[name], "closed")
        idx = int(name[1]) - 1
        variants = {}
        for omega in (("printed", "geodesic") if name[0] == "Y" else ("n/a",)):
            for sign in (1, -1):
                de = dt = 0.0
                for x in points:
                    ours = model.to_theta_components(lifted, x)
                    lit = (model.y_printed(idx, x, omega=omega) if name[0] == "Y" else x_printed(model, idx, x))
                    de = max(de, float(np.max(np.abs(ours[:3] - sign * lit[:3]))))
                    dt = max(dt, float(np.max(np.abs(ours[3:] - sign * lit[3:]))))
                variants[f"omega={omega},sign={sign:+d}"] = {"eps_block": de, "theta_block": dt}
        best = {blk: min(v[blk] for v in variants.values()) for blk in ("eps_block", "theta_block")}
        out[name] = {"variants": variants, "best": best,
                     "match": all(b < tol for b in best.values())}
    return out
