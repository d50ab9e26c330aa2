"""Free relativistic particle in one dimension.

The position invariant ``Q = q - (p/p0) c t`` generates a non-point
symmetry; the boost ``K`` is an ordinary one once completed with a time
component.  Momentum-like variables ``Pi``, ``XX`` close a centrally
extended Galilean algebra with ``H - m c^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import autodiff as ad
from ..flows import HJMap
from ..geometry import Chart, VectorField
from ..mechanics import LagrangianSystem, SymmetryCandidate, momenta
from ..poisson import Observable, canonical_chart, structure_constants


@dataclass(frozen=True)
class RelativisticParticle:
    m: float = 1.0
    c: float = 1.0
    margin: float = 1e-9

    def __post_init__(self):
        if self.m <= 0 or self.c <= 0:
            raise ValueError("mass and speed of light must be positive")

    # -- evolution manifold ------------------------------------------------
    def system(self) -> LagrangianSystem:
        m, c, vmax = self.m, self.c, self.c * (1 - self.margin)
        return LagrangianSystem(
            1,
            lambda t, q, v: -m * c * c * ad.sqrt(1 - v[0] * v[0] / (c * c)),
            lambda t, q, p: c * ad.sqrt(p[0] * p[0] + m * m * c * c),
            velocity_valid=lambda x: abs(x[2]) < vmax,
            name="relativistic",
        )

    def p0(self, p):
        return ad.sqrt(p * p + self.m * self.m * self.c * self.c)

    def hj(self) -> HJMap:
        c = self.c
        sys = self.system()
        return HJMap(
            H=lambda t, q, p: c * self.p0(p[0]),
            n=1,
            closed_form=lambda y, s: [y[0] + c * y[1] * s / self.p0(y[1]), y[1]],
            closed_inverse=lambda x: [x[1] - x[2] * c * x[0] / self.p0(x[2]), x[2]],
            sm_chart=Chart(2, ("Q", "P"), label="relativistic:SM"),
            em_chart=sys.momentum_chart,
        )

    # -- invariants on the velocity chart ------------------------------------
    def _p(self, v):
        c = self.c
        return self.m * v / ad.sqrt(1 - v * v / (c * c))

    def F_P(self, x):
        return self._p(x[2])

    def F_Q(self, x):
        t, q, v = x
        p = self._p(v)
        return q - p / self.p0(p) * self.c * t

    def F_K(self, x):
        t, q, v = x
        p = self._p(v)
        mc = self.m * self.c
        return self.p0(p) / mc * q - p / mc * self.c * t

    def x_q_field(self) -> VectorField:
        """Lift of ``-d/dP`` written on ``(t, q, qdot)``."""
        m, c = self.m, self.c
        sys = self.system()

        def comps(x):
            g = (1 - x[2] * x[2] / (c * c)) ** 1.5 / (m * c)
            return [0.0, -g * c * x[0], -g * c]

        return VectorField(sys.velocity_chart, comps, name="X_Q")

    def x_q_gauge_printed(self, x):
        """The gauge function as printed: ``q - qdot^3 t / c^2``."""
        return x[1] - x[2] ** 3 * x[0] / (self.c * self.c)

    def x_q_candidate(self, sign: float = -1.0) -> SymmetryCandidate:
        """``sign = -1`` is the gauge consistent with ``F_Q = +Q``; ``+1`` is the printed one."""
        return SymmetryCandidate(self.x_q_field(), lambda x: sign * self.x_q_gauge_printed(x), name="X_Q")

    def boost_field(self) -> VectorField:
        """Traditional form of the boost: ``q/c d_t + c t d_q + c (1 - v^2/c^2) d_v``."""
        c = self.c
        sys = self.system()
        return VectorField(
            sys.velocity_chart,
            lambda x: [x[1] / c, c * x[0], c * (1 - x[2] * x[2] / (c * c))],
            name="X_K",
        )

    def momentum_point(self, x):
        """``(t, q, v) -> (t, q, p)``."""
        return np.array([x[0], x[1], momenta(self.system(), x)[0]])

    # -- solution manifold ---------------------------------------------------
    def observables(self) -> dict[str, Observable]:
        ch = canonical_chart(1, label="relativistic:SM")
        m, c = self.m, self.c
        mc = m * c

        def P0(y):
            return self.p0(y[1])

        def denom(y):
            return ad.sqrt(2 * mc * (P0(y) + mc))

        obs = {
            "Q": lambda y: y[0],
            "P": lambda y: y[1],
            "H": lambda y: c * P0(y),
            "K": lambda y: y[0] * P0(y) / mc,
            "Pi": lambda y: 2 * mc * y[1] / denom(y),
            "XX": lambda y: 2 * P0(y) * y[0] / denom(y),
            "Hn": lambda y: c * P0(y) - mc * c,
        }
        return {k: Observable(ch, f, k) for k, f in obs.items()}

    def sm_samples(self, n: int = 40, seed: int = 0, pmax: float = 3.0) -> list[np.ndarray]:
        rng = np.random.default_rng(seed)
        return [np.array([rng.uniform(-2, 2), rng.uniform(-pmax, pmax) * self.m * self.c]) for _ in range(n)]

    def galilean_table(self, points):
        o = self.observables()
        names = [o["Pi"], o["XX"], o["Hn"]]
        return structure_constants(names, names, points, tol=1e-9)

    def poincare_table(self, points):
        o = self.observables()
        names = [o["P"], o["K"], o["H"]]
        return structure_constants(names, names, points, tol=1e-7)

    def pqh_table(self, points):
        o = self.observables()
        names = [o["P"], o["Q"], o["H"]]
        return structure_constants(names, names, points, tol=1e-7)
