"""Nestable forward-mode dual numbers.

A :class:`Dual` carries a primal value and a gradient with respect to the
variables seeded at one *level*.  Levels are tagged so that a dual seeded
inside a function that is itself being differentiated never mixes its
perturbation with the outer one.  Second derivatives come from nesting two
levels over the same variables (see :func:`seed`).
"""

from __future__ import annotations

import itertools
import math
from numbers import Real

import numpy as np

_tags = itertools.count(1)


class Dual:
    """``val + grad . e`` with ``e`` the unit perturbations of one level."""

    __slots__ = ("val", "grad", "tag")

    def __init__(self, val, grad, tag: int):
        self.val = val
        self.grad = grad
        self.tag = tag

    # -- level bookkeeping ------------------------------------------------
    def _same(self, other) -> bool:
        return isinstance(other, Dual) and other.tag == self.tag

    def _outer(self, other) -> bool:
        # other lives at an outer level and must drive the operation
        return isinstance(other, Dual) and other.tag > self.tag

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if self._same(other):
            return Dual(self.val + other.val, self.grad + other.grad, self.tag)
        if self._outer(other):
            return other.__radd__(self)
        return Dual(self.val + other, self.grad, self.tag)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.grad, self.tag)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if self._same(other):
            return Dual(self.val - other.val, self.grad - other.grad, self.tag)
        if self._outer(other):
            return other.__rsub__(self)
        return Dual(self.val - other, self.grad, self.tag)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.grad, self.tag)

    def __mul__(self, other):
        if self._same(other):
            return Dual(
                self.val * other.val,
                self.grad * other.val + other.grad * self.val,
                self.tag,
            )
        if self._outer(other):
            return other.__rmul__(self)
        return Dual(self.val * other, self.grad * other, self.tag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if self._same(other):
            inv = 1.0 / other.val
            val = self.val * inv
            return Dual(val, (self.grad - other.grad * val) * inv, self.tag)
        if self._outer(other):
            return other.__rtruediv__(self)
        inv = 1.0 / other
        return Dual(self.val * inv, self.grad * inv, self.tag)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        val = other * inv
        return Dual(val, self.grad * (-val * inv), self.tag)

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(log(self) * p)
        if isinstance(p, int) and p >= 0:
            if p == 0:
                return 1.0
            out = self
            for _ in range(p - 1):
                out = out * self
            return out
        return Dual(self.val ** p, self.grad * (p * self.val ** (p - 1)), self.tag)

    def __rpow__(self, base):
        return exp(self * math.log(base))

    # -- comparisons act on the primal value ------------------------------
    def __lt__(self, other):
        return primal(self) < primal(other)

    def __le__(self, other):
        return primal(self) <= primal(other)

    def __gt__(self, other):
        return primal(self) > primal(other)

    def __ge__(self, other):
        return primal(self) >= primal(other)

    def __float__(self):
        return float(primal(self))

    def __abs__(self):
        return -self if primal(self) < 0 else self

    def __repr__(self):
        return f"Dual({self.val!r}, {self.grad!r}, tag={self.tag})"


def primal(x) -> float:
    """Strip every dual level and return the underlying real number."""
    while isinstance(x, Dual):
        x = x.val
    return float(x)


def is_dual(x) -> bool:
    return isinstance(x, Dual)


# -- elementary functions ----------------------------------------------------
def sqrt(x):
    if isinstance(x, Dual):
        r = sqrt(x.val)
        return Dual(r, x.grad * (0.5 / r), x.tag)
    return math.sqrt(x)


def exp(x):
    if isinstance(x, Dual):
        e = exp(x.val)
        return Dual(e, x.grad * e, x.tag)
    return math.exp(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(log(x.val), x.grad * (1.0 / x.val), x.tag)
    return math.log(x)


def sin(x):
    if isinstance(x, Dual):
        return Dual(sin(x.val), x.grad * cos(x.val), x.tag)
    return math.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(cos(x.val), x.grad * (-sin(x.val)), x.tag)
    return math.cos(x)


def cos_sqrt(u):
    """``cos(sqrt(u))`` for ``u >= 0``, smooth through ``u = 0``."""
    if abs(primal(u)) < 1e-4:
        return 1.0 - u / 2.0 + u * u / 24.0 - u * u * u / 720.0 + u**4 / 40320.0
    return cos(sqrt(u))


def sinc_sqrt(u):
    """``sin(sqrt(u)) / sqrt(u)`` for ``u >= 0``, smooth through ``u = 0``."""
    if abs(primal(u)) < 1e-4:
        return 1.0 - u / 6.0 + u * u / 120.0 - u * u * u / 5040.0 + u**4 / 362880.0
    r = sqrt(u)
    return sin(r) / r


def as_scalar(x):
    """Coerce numpy scalars to Python floats so dual arithmetic dispatches."""
    if isinstance(x, Dual):
        return x
    if isinstance(x, (np.floating, np.integer)):
        return float(x)
    if isinstance(x, Real):
        return x
    raise TypeError(f"not a scalar: {type(x).__name__}")


# -- seeding and extraction --------------------------------------------------
def seed(x, order: int = 1):
    """Return ``x`` as a list of duals nested ``order`` levels deep.

    Every level perturbs the same variables, so a scalar ``f`` evaluated on
    the result carries all partial derivatives up to ``order``.
    """
    xs = [as_scalar(v) for v in x]
    n = len(xs)
    eye = np.eye(n)
    for _ in range(order):
        tag = next(_tags)
        xs = [Dual(v, eye[i].copy(), tag) for i, v in enumerate(xs)]
    return xs


def value_and_grad(y, n: int, tag: int):
    """Split a result of the level ``tag`` into (value, gradient[n])."""
    if isinstance(y, Dual) and y.tag == tag:
        return y.val, np.asarray(y.grad)
    return y, np.zeros(n)


def _maybe_float(a):
    if any(isinstance(v, Dual) for v in a.ravel()):
        return a
    return a.astype(float)


def jacobian_of(fn, x):
    """Values and Jacobian ``J[k, s] = d fn_k / d x_s`` of a vector function.

    ``x`` may itself hold duals of outer levels; the returned entries then
    keep those levels so the Jacobian can be differentiated again.
    """
    n = len(x)
    xs = seed(x, 1)
    tag = xs[0].tag
    out = list(fn(xs))
    vals = np.empty(len(out), dtype=object)
    jac = np.empty((len(out), n), dtype=object)
    for k, y in enumerate(out):
        v, g = value_and_grad(y, n, tag)
        vals[k] = v
        jac[k, :] = g
    return _maybe_float(vals), _maybe_float(jac)
