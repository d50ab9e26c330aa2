"""Free non-relativistic particle: the smallest end-to-end example."""

from __future__ import annotations

from dataclasses import dataclass

from ..flows import HJMap
from ..geometry import Chart
from ..mechanics import LagrangianSystem
from ..poisson import Observable, canonical_chart


@dataclass(frozen=True)
class FreeParticle:
    m: float = 1.0

    def system(self) -> LagrangianSystem:
        m = self.m
        return LagrangianSystem(
            1,
            lambda t, q, v: 0.5 * m * v[0] * v[0],
            lambda t, q, p: p[0] * p[0] / (2 * m),
            name="free",
        )

    def hj(self) -> HJMap:
        m = self.m
        sys = self.system()
        return HJMap(
            H=lambda t, q, p: p[0] * p[0] / (2 * m),
            n=1,
            closed_form=lambda y, s: [y[0] + y[1] * s / m, y[1]],
            closed_inverse=lambda x: [x[1] - x[2] * x[0] / m, x[2]],
            sm_chart=Chart(2, ("Q", "P"), label="free:SM"),
            em_chart=sys.momentum_chart,
        )

    def observables(self) -> dict[str, Observable]:
        ch = canonical_chart(1, label="free:SM")
        m = self.m
        return {
            "Q": Observable(ch, lambda y: y[0], "Q"),
            "P": Observable(ch, lambda y: y[1], "P"),
            "H": Observable(ch, lambda y: y[1] * y[1] / (2 * m), "H"),
        }
