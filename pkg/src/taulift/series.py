"""Truncated Laurent-tail series in one variable (z) and two variables (u, v).

Every series here has finitely many terms above any given level and is
known exactly only down to a lower bound.

``ZSeries``
    Coefficients known for all exponents ``>= lo``; true support bounded above
    by the largest stored exponent.  ``half=True`` marks exponents in Z + 1/2:
    the stored integer key ``n`` stands for ``z^(n + 1/2)``.

``BiSeries``
    Keys are integer pairs ``(a, b)`` for ``u^a v^b``.  The known region is
    ``a >= a_lo`` and ``a + b >= d_lo`` (``d`` is the total degree); the true
    support is declared to lie in ``a <= a_hi``, ``a + b <= d_hi``.  Using the
    total degree instead of the v-exponent is what makes the |u| > |v|
    expansions (whose v-powers are unbounded above) finite on every window.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import ParityMismatch, WindowExhausted, ZeroInverse
from .scalar import HScalar, INF, ONE, ZERO

NEG_INF = -math.inf


def _coerce(c) -> HScalar:
    return HScalar.coerce(c)


def _lo_of_product(lo_a, hi_a, lo_b, hi_b):
    return max(lo_a + hi_b, lo_b + hi_a)


class ZSeries:
    """One-variable Laurent tail over :class:`HScalar`.  Immutable."""

    __slots__ = ("_terms", "lo", "half", "var")

    def __init__(self, terms: Mapping[int, object] | None = None, lo=NEG_INF,
                 half: bool = False, var: str = "z"):
        if lo != NEG_INF:
            lo = int(lo)
        clean = {}
        for e, c in (terms or {}).items():
            if e < lo:
                continue
            c = _coerce(c)
            if c.is_zero() and c.is_exact:
                continue
            clean[int(e)] = c
        self._terms = clean
        self.lo = lo
        self.half = half
        self.var = var

    # -- constructors ---------------------------------------------------
    @classmethod
    def one(cls, var="z") -> "ZSeries":
        return cls({0: ONE}, var=var)

    @classmethod
    def monomial(cls, e: int, c=1, half=False, var="z") -> "ZSeries":
        return cls({e: c}, half=half, var=var)

    @classmethod
    def from_function(cls, f: Callable[[int], object], top: int, lo: int,
                      half=False, var="z") -> "ZSeries":
        return cls({e: f(e) for e in range(lo, top + 1)}, lo=lo, half=half, var=var)

    # -- inspection -----------------------------------------------------
    @property
    def hi(self):
        if self._terms:
            return max(self._terms)
        return NEG_INF if self.lo == NEG_INF else self.lo - 1

    @property
    def window(self):
        return (self.lo, self.hi)

    def items(self):
        return sorted(self._terms.items(), reverse=True)

    def keys(self):
        return sorted(self._terms, reverse=True)

    def coeff(self, e: int) -> HScalar:
        if e < self.lo:
            raise WindowExhausted(f"[{self.var}^{e}] is below the window (lo={self.lo})")
        return self._terms.get(e, ZERO)

    __getitem__ = coeff

    def h_trunc(self):
        return min((c.trunc for c in self._terms.values()), default=INF)

    def restrict(self, lo) -> "ZSeries":
        return ZSeries(self._terms, max(self.lo, lo), self.half, self.var)

    def map_coeffs(self, f) -> "ZSeries":
        return ZSeries({e: f(c) for e, c in self._terms.items()}, self.lo, self.half, self.var)

    def rename(self, var: str) -> "ZSeries":
        return ZSeries(self._terms, self.lo, self.half, var)

    def agrees(self, other: "ZSeries", lo=None) -> bool:
        return self.first_difference(other, lo) is None

    def first_difference(self, other: "ZSeries", lo=None):
        """First (exponent, hbar-exponent) pair where the two differ on the common window."""
        if self.half != other.half:
            raise ParityMismatch("comparing series of different parity")
        floor = max(self.lo, other.lo)
        if lo is not None:
            floor = max(floor, lo)
        for e in sorted(set(self._terms) | set(other._terms), reverse=True):
            if e < floor:
                continue
            d = self.coeff(e).first_difference(other.coeff(e))
            if d is not None:
                return (e, d)
        return None

    # -- arithmetic -----------------------------------------------------
    def _check_parity(self, other):
        if self.half != other.half:
            raise ParityMismatch("cannot add integer and half-integer series")

    def __add__(self, other):
        if not isinstance(other, ZSeries):
            other = ZSeries({0: _coerce(other)}, half=self.half, var=self.var)
        self._check_parity(other)
        lo = max(self.lo, other.lo)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out[e] + c if e in out else c
        return ZSeries(out, lo, self.half, self.var)

    __radd__ = __add__

    def __neg__(self):
        return ZSeries({e: -c for e, c in self._terms.items()}, self.lo, self.half, self.var)

    def __sub__(self, other):
        if not isinstance(other, ZSeries):
            other = ZSeries({0: _coerce(other)}, half=self.half, var=self.var)
        return self + (-other)

    def scale(self, c) -> "ZSeries":
        c = _coerce(c)
        return ZSeries({e: c * v for e, v in self._terms.items()}, self.lo, self.half, self.var)

    def shift(self, k: int) -> "ZSeries":
        """Multiply by z^k."""
        return ZSeries({e + k: c for e, c in self._terms.items()}, self.lo + k, self.half, self.var)

    def __mul__(self, other):
        if not isinstance(other, ZSeries):
            return self.scale(other)
        lo = _lo_of_product(self.lo, self.hi, other.lo, other.hi)
        carry = 1 if (self.half and other.half) else 0
        out: dict[int, HScalar] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2 + carry
                if e >= lo + carry:
                    p = c1 * c2
                    out[e] = out[e] + p if e in out else p
        return ZSeries(out, lo + carry, self.half != other.half, self.var)

    __rmul__ = __mul__

    def inv(self, lo=None, h_trunc=None) -> "ZSeries":
        """Inverse of a series dominated by its top term (unit coefficient)."""
        return zs_inv(self, lo, h_trunc)

    def __repr__(self):
        shown = ", ".join(f"{e}{'+1/2' if self.half else ''}: {c!r}" for e, c in self.items()[:6])
        return f"ZSeries({self.var}; lo={self.lo}; {{{shown}{', ...' if len(self._terms) > 6 else ''}}})"

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for e, c in self.items():
            for h, q in c.items():
                terms.append({"exp": e, "h_exp": h, "num": str(q.numerator), "den": str(q.denominator)})
        return {
            "var": self.var,
            "parity": "half" if self.half else "integer",
            "window": [_enc(self.lo), _enc(self.hi)],
            "h_trunc": _enc(self.h_trunc()),
            "terms": terms,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ZSeries":
        ht = _dec(data.get("h_trunc", None))
        lo = _dec(data["window"][0])
        acc: dict[int, dict[int, Fraction]] = {}
        for t in data["terms"]:
            acc.setdefault(int(t["exp"]), {})[int(t["h_exp"])] = Fraction(int(t["num"]), int(t["den"]))
        trunc = INF if ht is None else ht
        return cls({e: HScalar(d, trunc) for e, d in acc.items()}, lo,
                   data.get("parity") == "half", data.get("var", "z"))


def _enc(x):
    if x == INF:
        return "inf"
    if x == NEG_INF:
        return "-inf"
    return int(x)


def _dec(x):
    if x is None or x == "inf":
        return INF if x == "inf" else None
    if x == "-inf":
        return NEG_INF
    return int(x)


def zs_arith(a: ZSeries, b, kind: str) -> ZSeries:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "scale":
        return a.scale(b)
    raise ValueError(f"unknown kind {kind!r}")


def zs_inv(a: ZSeries, lo=None, h_trunc=None) -> ZSeries:
    """Invert ``a = c z^h (1 - y)`` by the geometric series in ``y`` (terms of ``y`` lie below z^0).

    ``lo`` bounds the output window when ``a`` is exact; ``h_trunc`` bounds the
    hbar accuracy when the top coefficient ``c`` is not a monomial.
    """
    if not a._terms:
        raise ZeroInverse("inverse of a zero series")
    h = a.hi
    c = a.coeff(h)
    cinv = c.inv(h_trunc)
    out_lo = a.lo - 2 * h if a.lo != NEG_INF else NEG_INF
    if lo is not None:
        out_lo = max(out_lo, lo)
    if out_lo == NEG_INF:
        if len(a._terms) == 1:
            return ZSeries({-h: cinv}, half=False, var=a.var)
        raise ValueError("inverse of an exact non-monomial series needs lo")
    if a.half:
        raise ParityMismatch("inverse of a half-integer series is not a Laurent tail in z")
    # result r with a * r = 1: r_{-h} = 1/c, r_{-h-k} = -(1/c) sum_{j>=1} a_{h-j} r_{-h-k+j}
    depth = -h - out_lo
    r = [cinv]
    for k in range(1, depth + 1):
        s = ZERO
        for j in range(1, k + 1):
            aj = a._terms.get(h - j)
            if aj is not None:
                s = s + aj * r[k - j]
        r.append(-(cinv * s))
    return ZSeries({-h - k: v for k, v in enumerate(r)}, out_lo, False, a.var)


# ---------------------------------------------------------------------------


class BiSeries:
    """Two-variable Laurent tail in (u, v).  Immutable; see module docstring for windows."""

    __slots__ = ("_terms", "a_lo", "d_lo", "a_hi", "d_hi")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None,
                 a_lo=NEG_INF, d_lo=NEG_INF, a_hi=None, d_hi=None):
        clean = {}
        for (a, b), c in (terms or {}).items():
            if a < a_lo or a + b < d_lo:
                continue
            c = _coerce(c)
            if c.is_zero() and c.is_exact:
                continue
            clean[(int(a), int(b))] = c
        self._terms = clean
        self.a_lo, self.d_lo = a_lo, d_lo
        if a_hi is None:
            a_hi = max((k[0] for k in clean), default=NEG_INF)
        if d_hi is None:
            d_hi = max((k[0] + k[1] for k in clean), default=NEG_INF)
        for a, b in clean:
            if a > a_hi or a + b > d_hi:
                raise ValueError(f"stored term u^{a}v^{b} exceeds declared support bounds")
        self.a_hi, self.d_hi = a_hi, d_hi

    # -- inspection -----------------------------------------------------
    def in_window(self, a: int, b: int) -> bool:
        return a >= self.a_lo and a + b >= self.d_lo

    def coeff(self, a: int, b: int) -> HScalar:
        if not self.in_window(a, b):
            raise WindowExhausted(
                f"[u^{a} v^{b}] outside window (a>={self.a_lo}, a+b>={self.d_lo})")
        return self._terms.get((a, b), ZERO)

    def __getitem__(self, key):
        return self.coeff(*key)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (-kv[0][0], -kv[0][1]))

    def keys(self):
        return [k for k, _ in self.items()]

    def __len__(self):
        return len(self._terms)

    @property
    def window(self):
        return {"a_lo": self.a_lo, "d_lo": self.d_lo, "a_hi": self.a_hi, "d_hi": self.d_hi}

    def h_trunc(self):
        return min((c.trunc for c in self._terms.values()), default=INF)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self._terms.values())

    def nonzero_keys(self):
        return [k for k, c in self.items() if not c.is_zero()]

    def restrict(self, a_lo=NEG_INF, d_lo=NEG_INF) -> "BiSeries":
        return BiSeries(self._terms, max(self.a_lo, a_lo), max(self.d_lo, d_lo), self.a_hi, self.d_hi)

    def map_coeffs(self, f) -> "BiSeries":
        return BiSeries({k: f(c) for k, c in self._terms.items()},
                        self.a_lo, self.d_lo, self.a_hi, self.d_hi)

    def first_difference(self, other: "BiSeries"):
        """First ((a, b), hbar-exponent) where the two differ on the common window."""
        for k in sorted(set(self._terms) | set(other._terms), key=lambda k: (-k[0], -k[1])):
            if not (self.in_window(*k) and other.in_window(*k)):
                continue
            d = self.coeff(*k).first_difference(other.coeff(*k))
            if d is not None:
                return (k, d)
        return None

    def agrees(self, other: "BiSeries") -> bool:
        return self.first_difference(other) is None

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, BiSeries):
            other = BiSeries({(0, 0): _coerce(other)})
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return BiSeries(out, max(self.a_lo, other.a_lo), max(self.d_lo, other.d_lo),
                        max(self.a_hi, other.a_hi), max(self.d_hi, other.d_hi))

    __radd__ = __add__

    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def __sub__(self, other):
        if not isinstance(other, BiSeries):
            other = BiSeries({(0, 0): _coerce(other)})
        return self + (-other)

    def scale(self, c) -> "BiSeries":
        c = _coerce(c)
        return self.map_coeffs(lambda x: c * x)

    def shift(self, p: int, q: int) -> "BiSeries":
        """Multiply by u^p v^q."""
        return BiSeries({(a + p, b + q): c for (a, b), c in self._terms.items()},
                        self.a_lo + p, self.d_lo + p + q, self.a_hi + p, self.d_hi + p + q)

    def __mul__(self, other):
        if not isinstance(other, BiSeries):
            return self.scale(other)
        a_lo = _lo_of_product(self.a_lo, self.a_hi, other.a_lo, other.a_hi)
        d_lo = _lo_of_product(self.d_lo, self.d_hi, other.d_lo, other.d_hi)
        out: dict[tuple[int, int], HScalar] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                a, b = a1 + a2, b1 + b2
                if a >= a_lo and a + b >= d_lo:
                    p = c1 * c2
                    k = (a, b)
                    out[k] = out[k] + p if k in out else p
        return BiSeries(out, a_lo, d_lo, self.a_hi + other.a_hi, self.d_hi + other.d_hi)

    __rmul__ = __mul__

    def __repr__(self):
        return f"BiSeries({len(self._terms)} terms; window={self.window})"

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for (a, b), c in self.items():
            for h, q in c.items():
                terms.append({"exps": [a, b], "h_exp": h, "num": str(q.numerator),
                              "den": str(q.denominator)})
        return {
            "var": ["u", "v"],
            "parity": "integer",
            "window": {k: _enc(v) for k, v in self.window.items()},
            "h_trunc": _enc(self.h_trunc()),
            "terms": terms,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BiSeries":
        w = {k: _dec(v) for k, v in data["window"].items()}
        ht = _dec(data.get("h_trunc", None))
        trunc = INF if ht is None else ht
        acc: dict[tuple[int, int], dict[int, Fraction]] = {}
        for t in data["terms"]:
            k = (int(t["exps"][0]), int(t["exps"][1]))
            acc.setdefault(k, {})[int(t["h_exp"])] = Fraction(int(t["num"]), int(t["den"]))
        return cls({k: HScalar(d, trunc) for k, d in acc.items()}, w["a_lo"], w["d_lo"],
                   w["a_hi"], w["d_hi"])


def bs_separable_product(fu: ZSeries, gv: ZSeries) -> BiSeries:
    """The product f(u) g(v) of two integer-parity series."""
    if fu.half or gv.half:
        raise ParityMismatch("separable products take integer-parity series")
    terms = {}
    for a, c in fu._terms.items():
        for b, d in gv._terms.items():
            terms[(a, b)] = c * d
    a_hi = fu.hi
    d_hi = fu.hi + gv.hi
    return BiSeries(terms, fu.lo, gv.lo + fu.hi, a_hi, d_hi)


def bs_from_u(fu: ZSeries) -> BiSeries:
    return bs_separable_product(fu, ZSeries.one())


def bs_from_v(gv: ZSeries) -> BiSeries:
    return bs_separable_product(ZSeries.one(), gv)


def kernel_expand(kind: str, a_lo: int) -> BiSeries:
    """Expansion in |u| > |v| of 1/(u-v) (KP) or (u-v)/(2(u+v)) (BKP), for u-exponents >= a_lo."""
    kind = kind.upper()
    if kind == "KP":
        terms = {(-k - 1, k): 1 for k in range(0, -a_lo)}
        return BiSeries(terms, a_lo, NEG_INF, -1, -1)
    if kind == "BKP":
        terms = {(0, 0): Fraction(1, 2)}
        for k in range(1, -a_lo + 1):
            terms[(-k, k)] = (-1) ** k
        return BiSeries(terms, a_lo, NEG_INF, 0, 0)
    raise ValueError(f"unknown kernel kind {kind!r}")


def bs_inverse_dominant_u(p: BiSeries, a_lo: int, h_trunc=None) -> BiSeries:
    """Invert an exact polynomial ``p = c u^d (1 - y)`` whose other terms have lower u-degree
    and total degree <= d, expanding the geometric series in ``y`` (the |u| > |v| region).
    """
    d = p.a_hi
    lead = [(k, c) for k, c in p._terms.items() if k[0] == d]
    if len(lead) != 1 or lead[0][0] != (d, 0):
        raise ValueError("polynomial is not dominated by a single pure u-monomial")
    if any(a + b > d for (a, b) in p._terms):
        raise ValueError("polynomial has terms of total degree above its u-degree")
    cinv = lead[0][1].inv(h_trunc)
    y = BiSeries({(a - d, b): -(cinv * c) for (a, b), c in p._terms.items() if (a, b) != (d, 0)},
                 a_hi=-1, d_hi=0)
    y = BiSeries(y._terms, NEG_INF, NEG_INF, -1, 0)
    target = a_lo + d
    acc = BiSeries({(0, 0): ONE}, NEG_INF, NEG_INF, 0, 0)
    power = acc
    k = 0
    while -(k + 1) >= target:
        power = power * y
        power = BiSeries({key: c for key, c in power._terms.items() if key[0] >= target},
                         NEG_INF, NEG_INF, 0, 0)
        acc = acc + power
        k += 1
    acc = BiSeries(acc._terms, target, NEG_INF, 0, 0)
    return acc.shift(-d, 0).scale(cinv)


def bs_from_polynomial(coeffs: Mapping[tuple[int, int], object]) -> BiSeries:
    return BiSeries(dict(coeffs))
