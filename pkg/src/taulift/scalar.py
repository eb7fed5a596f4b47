"""Exact coefficient ring: truncated Laurent series in hbar over the rationals.

An :class:`HScalar` stores finitely many exact rational coefficients together
with a truncation order ``trunc``: every coefficient at an exponent
``<= trunc`` is known exactly, everything above it is unknown.  ``trunc`` may
be ``math.inf`` for exact (finite) Laurent polynomials.

Rationals are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import NonPositiveValuation, ZeroInverse

Rat = Fraction
Number = Union[int, Fraction]
INF = math.inf


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class HScalar:
    """Truncated Laurent series in hbar.  Immutable."""

    __slots__ = ("_terms", "_trunc")

    def __init__(self, terms: Mapping[int, Number] | None = None, trunc=INF):
        if trunc != INF:
            trunc = int(trunc)
        clean = {}
        if terms:
            for e, c in terms.items():
                if e > trunc:
                    continue
                c = _frac(c)
                if c:
                    clean[int(e)] = c
        self._terms = clean
        self._trunc = trunc

    # -- constructors ---------------------------------------------------
    @classmethod
    def const(cls, c: Number = 1, trunc=INF) -> "HScalar":
        return cls({0: c}, trunc)

    @classmethod
    def monomial(cls, c: Number, e: int, trunc=INF) -> "HScalar":
        return cls({e: c}, trunc)

    @classmethod
    def hbar(cls, power: int = 1) -> "HScalar":
        return cls({power: 1})

    @classmethod
    def zero(cls, trunc=INF) -> "HScalar":
        return cls({}, trunc)

    @staticmethod
    def coerce(x) -> "HScalar":
        if isinstance(x, HScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return HScalar.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to HScalar")

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def trunc(self):
        return self._trunc

    @property
    def val_min(self):
        """Lower bound on the true valuation (exact when nonzero on the window)."""
        if self._terms:
            return min(self._terms)
        return INF if self._trunc == INF else self._trunc + 1

    @property
    def is_exact(self) -> bool:
        return self._trunc == INF

    def coeff(self, e: int) -> Fraction:
        if e > self._trunc:
            raise ValueError(f"coefficient of hbar^{e} is beyond trunc {self._trunc}")
        return self._terms.get(e, Fraction(0))

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        """Zero on its accuracy window."""
        return not self._terms

    def is_unit(self) -> bool:
        return bool(self._terms)

    def leading(self) -> tuple[int, Fraction]:
        if not self._terms:
            raise ZeroInverse("HScalar vanishes on its accuracy window")
        e = min(self._terms)
        return e, self._terms[e]

    def truncate(self, trunc) -> "HScalar":
        return HScalar(self._terms, min(self._trunc, trunc))

    def agrees(self, other, upto=None) -> bool:
        """Equality on the common accuracy window (optionally capped)."""
        other = HScalar.coerce(other)
        t = min(self._trunc, other._trunc)
        if upto is not None:
            t = min(t, upto)
        keys = set(self._terms) | set(other._terms)
        return all(self._terms.get(e, 0) == other._terms.get(e, 0) for e in keys if e <= t)

    def first_difference(self, other):
        """Smallest hbar exponent where the two disagree on the common window, or None."""
        other = HScalar.coerce(other)
        t = min(self._trunc, other._trunc)
        keys = sorted(set(self._terms) | set(other._terms))
        for e in keys:
            if e <= t and self._terms.get(e, 0) != other._terms.get(e, 0):
                return e
        return None

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        try:
            other = HScalar.coerce(other)
        except TypeError:
            return NotImplemented
        t = min(self._trunc, other._trunc)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return HScalar(out, t)

    __radd__ = __add__

    def __neg__(self):
        return HScalar({e: -c for e, c in self._terms.items()}, self._trunc)

    def __sub__(self, other):
        try:
            other = HScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return HScalar.coerce(other) - self

    def scale(self, c: Number) -> "HScalar":
        c = _frac(c)
        if not c:
            return HScalar({}, self._trunc)
        return HScalar({e: c * v for e, v in self._terms.items()}, self._trunc)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, HScalar):
            return NotImplemented
        t = min(self._trunc + other.val_min, other._trunc + self.val_min)
        out: dict[int, Fraction] = {}
        b = other._terms
        for e1, c1 in self._terms.items():
            for e2, c2 in b.items():
                e = e1 + e2
                if e <= t:
                    out[e] = out.get(e, 0) + c1 * c2
        return HScalar(out, t)

    __rmul__ = __mul__

    def shift(self, k: int) -> "HScalar":
        """Multiply by hbar^k."""
        return HScalar({e + k: c for e, c in self._terms.items()}, self._trunc + k)

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = HScalar.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inv(self, trunc=None) -> "HScalar":
        """Multiplicative inverse; ``trunc`` caps the output when ``self`` is exact."""
        return hs_inv(self, trunc)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroInverse("division by zero")
            return self.scale(Fraction(1) / _frac(other))
        if not isinstance(other, HScalar):
            return NotImplemented
        return self * hs_inv(other)

    def __rtruediv__(self, other):
        return HScalar.coerce(other) * hs_inv(self)

    # -- misc -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HScalar.const(other)
        if not isinstance(other, HScalar):
            return NotImplemented
        return self._terms == other._terms and self._trunc == other._trunc

    def __hash__(self):
        return hash((tuple(sorted(self._terms.items())), self._trunc))

    def __repr__(self):
        parts = []
        for e, c in self.items():
            if e == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c}*h^{e}")
        body = " + ".join(parts) if parts else "0"
        if self._trunc != INF:
            body += f" + O(h^{self._trunc + 1})"
        return f"HScalar({body})"


ONE = HScalar.const(1)
ZERO = HScalar.zero()


def hs_arith(a, b, kind: str) -> HScalar:
    a, b = HScalar.coerce(a), HScalar.coerce(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown kind {kind!r}")


def hs_inv(a: HScalar, trunc=None) -> HScalar:
    """Inverse of a Laurent series with nonzero leading coefficient.

    The accuracy window of the result is ``a.trunc - 2*val(a)``; for an exact
    non-monomial input an explicit ``trunc`` is required.
    """
    a = HScalar.coerce(a)
    v, lead = a.leading()
    if len(a._terms) == 1 and a.is_exact:
        out = HScalar({-v: 1 / lead})
        return out if trunc is None else out.truncate(trunc)
    t = a.trunc - 2 * v
    if trunc is not None:
        t = min(t, trunc)
    if t == INF:
        raise ValueError("inverse of an exact non-monomial series needs an explicit trunc")
    inv_lead = 1 / lead
    # b_{-v+k} = -(1/a_v) * sum_{j=1..k} a_{v+j} b_{-v+k-j}
    coeffs = [inv_lead]
    terms = a._terms
    for k in range(1, t + v + 1):
        s = Fraction(0)
        for j in range(1, k + 1):
            c = terms.get(v + j)
            if c:
                s += c * coeffs[k - j]
        coeffs.append(-inv_lead * s)
    return HScalar({-v + k: c for k, c in enumerate(coeffs)}, t)


def hs_exp(a: HScalar, trunc=None) -> HScalar:
    """exp(a) for a series of strictly positive valuation."""
    a = HScalar.coerce(a)
    if any(e <= 0 for e in a._terms):
        raise NonPositiveValuation(f"exp needs positive hbar-valuation, got {a!r}")
    t = a.trunc if trunc is None else min(a.trunc, trunc)
    if a.is_zero() and t == INF:
        return ONE
    if t == INF:
        raise ValueError("exp of an exact series needs an explicit trunc")
    a = a.truncate(t)
    result = HScalar.const(1, t)
    if a.is_zero():
        return result
    term = HScalar.const(1, t)
    v = a.val_min
    m = 1
    while m * v <= t:
        term = (term * a).scale(Fraction(1, m))
        result = result + term
        m += 1
    return result.truncate(t)


def hs_sum(items: Iterable[HScalar]) -> HScalar:
    total = ZERO
    for x in items:
        total = total + x
    return total


def hs_poly(coeffs: Iterable[Number]) -> HScalar:
    """Exact polynomial c0 + c1*h + c2*h^2 + ..."""
    return HScalar({i: c for i, c in enumerate(coeffs)})
