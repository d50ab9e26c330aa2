"""Exact trigonometric polynomials in two canonical variables and time.

A term is ``c * m^e1 * w^e2 * lam^e3 * X^a * Y^b * t^c * h(k*w*t)`` with a
rational ``c``, integer exponents on the symbolic parameters ``m``, ``w``
(omega) and ``lam`` and ``h`` one of ``1``, ``cos``, ``sin``.  ``X, Y`` are
the two slots of a canonical pair; printing labels them (``Q, P`` or
``q0, p0``) but the algebra does not care.

Normal form: terms merged and sorted, zero coefficients dropped, ``cos(0)``
folded into ``1`` and ``sin(0)`` dropped, negative ``k`` folded by parity.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from . import autodiff as ad

ONE, COS, SIN = 0, 1, 2
_HNAME = {ONE: "", COS: "cos", SIN: "sin"}
_HCODE = {"1": ONE, "cos": COS, "sin": SIN}

# key: (m_exp, w_exp, lam_exp, a, b, c, h, k)
Key = tuple


def _norm_key(me, we, le, a, b, c, h, k, coeff):
    """Fold signs of ``k``; returns ``(key, coeff)`` or ``None`` for a zero term."""
    if h != ONE and k < 0:
        k = -k
        if h == SIN:
            coeff = -coeff
    if h != ONE and k == 0:
        if h == SIN:
            return None
        h = ONE
    if h == ONE:
        k = 0
    return (me, we, le, a, b, c, h, k), coeff


class TrigPoly:
    __slots__ = ("_terms", "truncated")

    def __init__(self, terms: Mapping[Key, Fraction] | Iterable = (), truncated: bool = False):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, coeff in items:
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            nk = _norm_key(*key, coeff)
            if nk is None:
                continue
            key, coeff = nk
            acc[key] = acc.get(key, Fraction(0)) + coeff
        self._terms = tuple(sorted((k, v) for k, v in acc.items() if v != 0))
        self.truncated = truncated

    # -- construction ---------------------------------------------------
    @classmethod
    def const(cls, c, *, m=0, w=0, lam=0) -> "TrigPoly":
        return cls({(m, w, lam, 0, 0, 0, ONE, 0): Fraction(c)})

    @classmethod
    def monomial(cls, c=1, *, m=0, w=0, lam=0, a=0, b=0, t=0, h="1", k=0) -> "TrigPoly":
        return cls({(m, w, lam, a, b, t, _HCODE[h], k): Fraction(c)})

    @property
    def terms(self) -> tuple:
        return self._terms

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TrigPoly.const(other)
        return isinstance(other, TrigPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def lam_degree(self) -> int:
        return max((k[2] for k, _ in self._terms), default=0)

    def lam_part(self, order: int) -> "TrigPoly":
        """Terms of exactly ``lam^order``, with the ``lam`` factor removed."""
        return TrigPoly({(k[0], k[1], 0) + k[3:]: v for k, v in self._terms if k[2] == order})

    def truncate(self, order: int | None) -> "TrigPoly":
        if order is None:
            return self
        keep = [(k, v) for k, v in self._terms if k[2] <= order]
        return TrigPoly(keep, truncated=self.truncated or len(keep) < len(self._terms))

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        return TrigPoly(list(self._terms) + list(other._terms), self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly([(k, -v) for k, v in self._terms], self.truncated)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        return multiply(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return power(self, n)

    def scale(self, c, *, m=0, w=0, lam=0) -> "TrigPoly":
        c = Fraction(c)
        return TrigPoly([((k[0] + m, k[1] + w, k[2] + lam) + k[3:], v * c) for k, v in self._terms], self.truncated)

    # -- evaluation and output --------------------------------------------
    def evaluate(self, X, Y, t, m=1.0, w=1.0, lam=1.0):
        """Numeric value; every argument may be a dual number."""
        out = 0.0
        for (me, we, le, a, b, c, h, k), v in self._terms:
            term = float(v) * _ipow(m, me) * _ipow(w, we) * _ipow(lam, le) * _ipow(X, a) * _ipow(Y, b) * _ipow(t, c)
            if h == COS:
                term = term * ad.cos(k * w * t)
            elif h == SIN:
                term = term * ad.sin(k * w * t)
            out = out + term
        return out

    def to_list(self) -> list:
        return [
            {"coeff": str(v), "m": k[0], "omega": k[1], "lambda": k[2], "X": k[3], "Y": k[4],
             "t": k[5], "h": _HNAME[k[6]] or "1", "k": k[7]}
            for k, v in self._terms
        ]

    def to_json(self) -> str:
        return json.dumps({"terms": self.to_list(), "truncated": self.truncated}, sort_keys=True)

    @classmethod
    def from_list(cls, items) -> "TrigPoly":
        return cls([
            ((d["m"], d["omega"], d["lambda"], d["X"], d["Y"], d["t"], _HCODE[d["h"]], d["k"]), Fraction(d["coeff"]))
            for d in items
        ])

    def pretty(self, names=("Q", "P")) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (me, we, le, a, b, c, h, k), v in self._terms:
            fac = []
            for sym, e in (("lam", le), ("m", me), ("w", we), (names[0], a), (names[1], b), ("t", c)):
                if e == 1:
                    fac.append(sym)
                elif e:
                    fac.append(f"{sym}^{e}")
            if h != ONE:
                arg = "w*t" if k == 1 else f"{k}*w*t"
                fac.append(f"{_HNAME[h]}({arg})")
            mag = abs(v)
            body = "*".join(fac)
            if not body:
                s = str(mag)
            elif mag == 1:
                s = body
            else:
                s = f"{mag}*{body}"
            parts.append(("- " if v < 0 else "+ ") + s)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[1:]

    def __repr__(self):
        return f"TrigPoly({self.pretty()})"


def _ipow(x, e: int):
    if e == 0:
        return 1.0
    if e > 0:
        return x**e
    return 1.0 / x ** (-e)


def _coerce(x) -> TrigPoly:
    if isinstance(x, TrigPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return TrigPoly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as TrigPoly")


# -- products ---------------------------------------------------------------
def _harm_product(h1, k1, h2, k2):
    """``h1(k1 x) * h2(k2 x)`` as a list of ``(coeff, h, k)``."""
    half = Fraction(1, 2)
    if h1 == ONE:
        return [(Fraction(1), h2, k2)]
    if h2 == ONE:
        return [(Fraction(1), h1, k1)]
    if h1 == COS and h2 == COS:
        return [(half, COS, k1 - k2), (half, COS, k1 + k2)]
    if h1 == SIN and h2 == SIN:
        return [(half, COS, k1 - k2), (-half, COS, k1 + k2)]
    if h1 == SIN:  # sin a cos b
        return [(half, SIN, k1 + k2), (half, SIN, k1 - k2)]
    return [(half, SIN, k1 + k2), (half, SIN, k2 - k1)]  # cos a sin b


def multiply(f: TrigPoly, g: TrigPoly, order: int | None = None) -> TrigPoly:
    out = []
    dropped = False
    for k1, v1 in f:
        for k2, v2 in g:
            le = k1[2] + k2[2]
            if order is not None and le > order:
                dropped = True
                continue
            base = (k1[0] + k2[0], k1[1] + k2[1], le, k1[3] + k2[3], k1[4] + k2[4], k1[5] + k2[5])
            for c, h, k in _harm_product(k1[6], k1[7], k2[6], k2[7]):
                out.append((base + (h, k), v1 * v2 * c))
    return TrigPoly(out, f.truncated or g.truncated or dropped)


def power(f: TrigPoly, n: int, order: int | None = None) -> TrigPoly:
    if n < 0:
        raise ValueError("negative powers are not polynomial")
    out = TrigPoly.const(1)
    for _ in range(n):
        out = multiply(out, f, order)
    return out


# -- calculus ---------------------------------------------------------------
def d_slot(f: TrigPoly, slot: int) -> TrigPoly:
    """Partial derivative in slot 0 (``X``) or 1 (``Y``)."""
    idx = 3 + slot
    out = []
    for k, v in f:
        e = k[idx]
        if e:
            nk = list(k)
            nk[idx] = e - 1
            out.append((tuple(nk), v * e))
    return TrigPoly(out, f.truncated)


def poisson(f: TrigPoly, g: TrigPoly, order: int | None = None) -> TrigPoly:
    """``{f, g} = f_Y g_X - f_X g_Y`` (so ``{Y, X} = 1``); ``t`` is inert."""
    r = multiply(d_slot(f, 1), d_slot(g, 0), order) - multiply(d_slot(f, 0), d_slot(g, 1), order)
    return r


def d_time(f: TrigPoly) -> TrigPoly:
    """Total ``d/dt`` (raises the ``w`` exponent when a harmonic is hit)."""
    out = []
    for (me, we, le, a, b, c, h, k), v in f:
        if c:
            out.append(((me, we, le, a, b, c - 1, h, k), v * c))
        if h == COS:
            out.append(((me, we + 1, le, a, b, c, SIN, k), -v * k))
        elif h == SIN:
            out.append(((me, we + 1, le, a, b, c, COS, k), v * k))
    return TrigPoly(out, f.truncated)


@lru_cache(maxsize=None)
def _integral(c: int, h: int, k: int) -> tuple:
    """``int_0^t s^c h(k w s) ds`` as ``((coeff, w_shift, c', h', k'), ...)``.

    Integration by parts, one power of ``s`` at a time.
    """
    if h == ONE:
        return ((Fraction(1, c + 1), 0, c + 1, ONE, 0),)
    inv = Fraction(1, k)
    if h == COS:
        # s^c sin/(k w)  -  c/(k w) int s^(c-1) sin
        first = [(inv, -1, c, SIN, k)]
        rest = [] if c == 0 else [(-c * inv * q, ws - 1, cc, hh, kk) for q, ws, cc, hh, kk in _integral(c - 1, SIN, k)]
        return tuple(first + rest)
    # sin: -s^c cos/(k w) + [c == 0] / (k w) + c/(k w) int s^(c-1) cos
    first = [(-inv, -1, c, COS, k)]
    if c == 0:
        first.append((inv, -1, 0, ONE, 0))
        return tuple(first)
    rest = [(c * inv * q, ws - 1, cc, hh, kk) for q, ws, cc, hh, kk in _integral(c - 1, COS, k)]
    return tuple(first + rest)


def integrate_time(f: TrigPoly) -> TrigPoly:
    """Exact ``int_0^t f(s) ds``."""
    out = []
    for (me, we, le, a, b, c, h, k), v in f:
        for q, ws, cc, hh, kk in _integral(c, h, k):
            out.append(((me, we + ws, le, a, b, cc, hh, kk), v * q))
    return TrigPoly(out, f.truncated)


def substitute(f: TrigPoly, X: TrigPoly, Y: TrigPoly, order: int | None = None) -> TrigPoly:
    """``f(X, Y)``: replace the slots by trig polynomials (time factors multiply)."""
    cacheX, cacheY = {0: TrigPoly.const(1)}, {0: TrigPoly.const(1)}

    def pw(cache, base, n):
        if n not in cache:
            cache[n] = multiply(pw(cache, base, n - 1), base, order)
        return cache[n]

    acc = TrigPoly()
    flag = f.truncated
    for (me, we, le, a, b, c, h, k), v in f:
        if order is not None and le > order:
            flag = True
            continue
        head = TrigPoly({(me, we, le, 0, 0, c, h, k): v})
        acc = acc + multiply(multiply(head, pw(cacheX, X, a), order), pw(cacheY, Y, b), order)
    return TrigPoly(acc.terms, acc.truncated or flag)


# -- handy constants -----------------------------------------------------------
X = TrigPoly.monomial(a=1)
Y = TrigPoly.monomial(b=1)
T = TrigPoly.monomial(t=1)


def cos_wt(k: int = 1) -> TrigPoly:
    return TrigPoly.monomial(h="cos", k=k)


def sin_wt(k: int = 1) -> TrigPoly:
    return TrigPoly.monomial(h="sin", k=k)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """``B_n`` with ``B_1 = -1/2``, from ``sum_{j<=n} C(n+1, j) B_j = 0``."""
    if n < 0:
        raise ValueError("n >= 0")
    if n == 0:
        return Fraction(1)
    from math import comb

    return -sum(comb(n + 1, j) * bernoulli(j) for j in range(n)) / Fraction(n + 1)
