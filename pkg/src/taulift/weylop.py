"""Differential/shift operators in symbol form.

An :class:`OpSymbol` acts on monomials by ``z^n -> eigen_s(n) z^(n+s)``, one
eigen-function per shift ``s``.  This covers polynomial differential operators
as well as exponentials such as ``exp(c z d/dz)`` whose expansion in the
``z^k d^l`` basis is infinite.

Operators built from a truncated series multiplier (``1/x'(z)`` for instance)
carry a ``floor``: every shift ``>= floor`` is exact, shifts below it were
dropped.  Application and composition shrink windows accordingly.

Symbol rules used throughout (verified against the generator definitions in
the test-suite):

* adjoint, ``(z^k d^l)* = (-d)^l z^k``:   ``f*(n) = f(-n-s-1)``
* involution, ``iota(z^k (z d)^m) = (-z d)^m (-z)^k``:   ``f_iota(n) = (-1)^s f(-n-s)``

Both reverse products: ``(AB)* = B* A*`` and ``iota(AB) = iota(B) iota(A)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import InvalidExponential, NonPositiveValuation, ParityMismatch
from .scalar import HScalar, ONE, ZERO, hs_exp
from .series import NEG_INF, BiSeries, ZSeries

Index = Union[int, Fraction]
Eigen = Callable[[Index], HScalar]


def _cached(f: Eigen) -> Eigen:
    if hasattr(f, "cache_info"):
        return f
    return lru_cache(maxsize=None)(f)


def _const(c) -> Eigen:
    c = HScalar.coerce(c)
    return lambda n: c


class OpSymbol:
    """Operator ``sum_s z^s * eigen_s(z d/dz)`` restricted to its known shifts."""

    __slots__ = ("terms", "floor", "name")

    def __init__(self, terms: Mapping[int, Eigen], floor=None, name: str = ""):
        kept = {}
        for s, f in terms.items():
            if floor is not None and s < floor:
                continue
            kept[int(s)] = _cached(f)
        self.terms: dict[int, Eigen] = kept
        self.floor = floor
        self.name = name

    @property
    def shifts(self) -> list[int]:
        return sorted(self.terms, reverse=True)

    @property
    def s_max(self) -> int:
        return max(self.terms) if self.terms else 0

    @property
    def s_min(self):
        if self.floor is not None:
            return self.floor
        return min(self.terms) if self.terms else 0

    def eigen(self, s: int, n: Index) -> HScalar:
        f = self.terms.get(s)
        return ZERO if f is None else f(n)

    def is_empty(self) -> bool:
        return not self.terms

    def __repr__(self):
        label = f"{self.name}; " if self.name else ""
        fl = "" if self.floor is None else f"; floor={self.floor}"
        return f"OpSymbol({label}shifts={self.shifts}{fl})"

    # sugar
    def __add__(self, other):
        return op_add(self, other)

    def __sub__(self, other):
        return op_add(self, op_scale(other, -1))

    def __neg__(self):
        return op_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, OpSymbol):
            return op_compose(self, other)
        return op_scale(self, other)

    def __rmul__(self, other):
        return op_scale(self, other)

    def __matmul__(self, other):
        return op_compose(self, other)


# ---------------------------------------------------------------------------
# construction

def op_identity() -> OpSymbol:
    return OpSymbol({0: _const(ONE)}, name="1")


def op_zero() -> OpSymbol:
    return OpSymbol({}, name="0")


def op_z(k: int = 1, c=1) -> OpSymbol:
    """Multiplication by c * z^k."""
    return OpSymbol({k: _const(c)}, name=f"z^{k}")


def op_euler_poly(coeffs: Sequence, k: int = 0) -> OpSymbol:
    """``z^k p(z d/dz)`` with ``p(t) = sum_i coeffs[i] t^i`` (coefficients may be HScalars)."""
    cs = [HScalar.coerce(c) for c in coeffs]

    def f(n):
        acc = ZERO
        for c in reversed(cs):
            acc = acc.scale(n) + c
        return acc

    return OpSymbol({k: f}, name=f"z^{k}p(zd)")


def op_monomial(k: int, l: int) -> OpSymbol:
    """``z^k d^l``: shift ``k-l``, eigen the falling factorial ``n(n-1)...(n-l+1)``."""
    if l < 0:
        raise ValueError("derivative order must be >= 0")

    def f(n):
        p = Fraction(1)
        for j in range(l):
            p *= n - j
        return HScalar.const(p)

    return OpSymbol({k - l: f}, name=f"z^{k}d^{l}")


def op_exp_euler(c=None, k: int = 0, exponent: Callable[[Index], HScalar] | None = None,
                 h_trunc: int | None = None) -> OpSymbol:
    """``exp(c z d/dz) z^k``; or ``exp(P(z d/dz)) z^k`` when ``exponent`` = P is given.

    An exact ``c`` is truncated at ``h_trunc`` before exponentiating.
    """
    if exponent is None:
        c = HScalar.coerce(c)
        if any(e <= 0 for e in c.terms):
            raise InvalidExponential(f"exp(c z d/dz) needs val(c) >= 1, got {c!r}")
        if h_trunc is not None:
            c = c.truncate(h_trunc)
        exponent = lambda m: c.scale(m)

    def f(n):
        try:
            return hs_exp(exponent(n + k))
        except NonPositiveValuation as exc:
            raise InvalidExponential(str(exc)) from exc

    return OpSymbol({k: f}, name=f"exp(P(zd))z^{k}")


def op_multiply_series(g: ZSeries) -> OpSymbol:
    """Multiplication by a truncated series; shifts below ``g.lo`` are unknown."""
    if g.half:
        raise ParityMismatch("multiplier must have integer exponents")
    terms = {e: _const(c) for e, c in g.items()}
    floor = None if g.lo == NEG_INF else int(g.lo)
    return OpSymbol(terms, floor=floor, name="mult")


def op_derivative() -> OpSymbol:
    return op_monomial(0, 1)


def op_from_generator(kind: str, **params) -> OpSymbol:
    """Build a symbol from a named generator.

    kinds: ``monomial`` (k, l), ``euler_poly`` (coeffs, k), ``exp_euler`` (c, k),
    ``J`` (n), ``L`` (n), ``HB`` (n odd), ``LB`` (n even), ``z`` (k), ``identity``,
    or ``lifting`` (model, plus that model's parameters).
    """
    kind_l = kind.lower()
    if kind_l == "monomial":
        return op_monomial(params.get("k", 0), params.get("l", 0))
    if kind_l == "euler_poly":
        return op_euler_poly(params["coeffs"], params.get("k", 0))
    if kind_l == "exp_euler":
        return op_exp_euler(params.get("c"), params.get("k", 0), params.get("exponent"),
                            params.get("h_trunc"))
    if kind_l == "z":
        return op_z(params.get("k", 1), params.get("c", 1))
    if kind_l == "identity":
        return op_identity()
    if kind in ("J", "HB"):
        n = params["n"]
        if kind == "HB" and n % 2 == 0:
            raise ValueError("B-type Heisenberg generators need odd n")
        return OpSymbol({n: _const(-1)}, name=f"{kind}_{n}")
    if kind == "L":
        n = params["n"]
        return OpSymbol({n: lambda m: HScalar.const(-(m + Fraction(n + 1, 2)))}, name=f"L_{n}")
    if kind == "LB":
        n = params["n"]
        if n % 2:
            raise ValueError("B-type Virasoro generators need even n")
        return OpSymbol({n: lambda m: HScalar.const(-(m + Fraction(n, 2)))}, name=f"LB_{n}")
    if kind_l == "lifting":
        p = dict(params)
        model = p.pop("model")
        return lifting_operator(model, **p)
    raise ValueError(f"unknown generator kind {kind!r}")


# ---------------------------------------------------------------------------
# algebra

def _floor_max(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def op_scale(A: OpSymbol, c) -> OpSymbol:
    c = HScalar.coerce(c)
    return OpSymbol({s: (lambda n, f=f: c * f(n)) for s, f in A.terms.items()}, A.floor, A.name)


def op_add(A: OpSymbol, B: OpSymbol) -> OpSymbol:
    terms: dict[int, Eigen] = dict(A.terms)
    for s, g in B.terms.items():
        if s in terms:
            f = terms[s]
            terms[s] = lambda n, f=f, g=g: f(n) + g(n)
        else:
            terms[s] = g
    return OpSymbol(terms, _floor_max(A.floor, B.floor))


def op_compose(A: OpSymbol, B: OpSymbol) -> OpSymbol:
    """``A o B``: shift ``sA+sB``, eigen ``fA(n+sB) fB(n)``."""
    floor = None
    if A.floor is not None or B.floor is not None:
        cand = []
        if A.floor is not None:
            cand.append(A.floor + B.s_max)
        if B.floor is not None:
            cand.append(B.floor + A.s_max)
        floor = max(cand)
    groups: dict[int, list[tuple[Eigen, int, Eigen]]] = {}
    for sa, fa in A.terms.items():
        for sb, fb in B.terms.items():
            s = sa + sb
            if floor is not None and s < floor:
                continue
            groups.setdefault(s, []).append((fa, sb, fb))

    def make(parts):
        def f(n):
            acc = ZERO
            for fa, sb, fb in parts:
                acc = acc + fa(n + sb) * fb(n)
            return acc
        return f

    return OpSymbol({s: make(p) for s, p in groups.items()}, floor)


def op_pow(A: OpSymbol, k: int) -> OpSymbol:
    out = op_identity()
    for _ in range(k):
        out = op_compose(out, A)
    return out


def op_poly(coeffs: Sequence, A: OpSymbol) -> OpSymbol:
    """``sum_k coeffs[k] A^k``."""
    out = op_zero()
    power = op_identity()
    for k, c in enumerate(coeffs):
        if k:
            power = op_compose(power, A)
        c = HScalar.coerce(c)
        if not c.is_zero():
            out = op_add(out, op_scale(power, c))
    return out


def op_adjoint(A: OpSymbol) -> OpSymbol:
    """Formal adjoint, fixed by ``(z^k d^l)* = (-d)^l z^k``."""
    return OpSymbol({s: (lambda n, f=f, s=s: f(-n - s - 1)) for s, f in A.terms.items()},
                    A.floor, f"{A.name}*" if A.name else "")


def op_iota(A: OpSymbol) -> OpSymbol:
    """The involution ``z -> -z``, ``z d/dz -> -z d/dz`` (order-reversing)."""
    return OpSymbol({s: (lambda n, f=f, s=s: f(-n - s).scale((-1) ** (s % 2)))
                     for s, f in A.terms.items()}, A.floor)


def op_antisym(A: OpSymbol) -> OpSymbol:
    """``(A - iota(A)) / 2``."""
    return op_scale(op_add(A, op_scale(op_iota(A), -1)), Fraction(1, 2))


def op_half_conjugate(A: OpSymbol) -> OpSymbol:
    """``z^(1/2) A z^(-1/2)``, so that the operator acts on half-integer exponents."""
    return OpSymbol({s: (lambda n, f=f: f(n - Fraction(1, 2))) for s, f in A.terms.items()},
                    A.floor, A.name)


def op_agrees(A: OpSymbol, B: OpSymbol, ns: Iterable[Index]) -> bool:
    """Compare eigen-functions shift by shift on the sample points ``ns``."""
    ns = list(ns)
    for s in set(A.terms) | set(B.terms):
        if A.floor is not None and s < A.floor or B.floor is not None and s < B.floor:
            continue
        for n in ns:
            if not A.eigen(s, n).agrees(B.eigen(s, n)):
                return False
    return True


def is_lifting_candidate(A: OpSymbol, ns: Iterable[Index]) -> bool:
    """Top shift is 1 and its eigen has hbar-constant term 1 (a unit) on ``ns``."""
    if 1 not in A.terms or A.s_max != 1:
        return False
    for n in ns:
        e = A.eigen(1, n)
        if not e.is_unit() or e.val_min != 0 or e.coeff(0) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# action on series

def op_apply(A: OpSymbol, x, side: str = "z"):
    """Apply ``A`` to a series in the variable ``side`` (``z`` for ZSeries, ``u``/``v`` for BiSeries)."""
    if isinstance(x, ZSeries):
        return _apply_z(A, x)
    if isinstance(x, BiSeries):
        if side == "u":
            return _apply_u(A, x)
        if side == "v":
            return _apply_v(A, x)
        raise ValueError("side must be 'u' or 'v' for a two-variable series")
    raise TypeError(f"cannot apply an operator to {type(x).__name__}")


def _apply_z(A: OpSymbol, x: ZSeries) -> ZSeries:
    if A.is_empty():
        return ZSeries({}, NEG_INF, x.half, x.var)
    top = A.s_max
    lo = x.lo + top
    if A.floor is not None:
        if x.hi == NEG_INF:
            return ZSeries({}, NEG_INF, x.half, x.var)
        lo = max(lo, x.hi + A.floor)
    half = Fraction(1, 2) if x.half else 0
    out: dict[int, HScalar] = {}
    for e, c in x.items():
        n = e + half
        for s, f in A.terms.items():
            t = e + s
            if t < lo:
                continue
            p = f(n) * c
            out[t] = out[t] + p if t in out else p
    return ZSeries(out, lo, x.half, x.var)


def _apply_u(A: OpSymbol, x: BiSeries) -> BiSeries:
    top = A.s_max
    a_lo = x.a_lo + top
    if A.floor is not None:
        a_lo = max(a_lo, x.a_hi + A.floor)
    d_lo = x.d_lo + top
    out: dict[tuple[int, int], HScalar] = {}
    for (a, b), c in x.items():
        for s, f in A.terms.items():
            t = a + s
            if t < a_lo or t + b < d_lo:
                continue
            p = f(a) * c
            k = (t, b)
            out[k] = out[k] + p if k in out else p
    return BiSeries(out, a_lo, d_lo, x.a_hi + top, x.d_hi + top)


def _apply_v(A: OpSymbol, x: BiSeries) -> BiSeries:
    top = A.s_max
    d_lo = x.d_lo + top
    if A.floor is not None:
        d_lo = max(d_lo, x.d_hi + A.floor)
    out: dict[tuple[int, int], HScalar] = {}
    for (a, b), c in x.items():
        for s, f in A.terms.items():
            t = b + s
            if a + t < d_lo:
                continue
            p = f(b) * c
            k = (a, t)
            out[k] = out[k] + p if k in out else p
    return BiSeries(out, x.a_lo, d_lo, x.a_hi, x.d_hi + top)


# ---------------------------------------------------------------------------
# lifting operators of the registered models

def _hbar(c=1, e=1) -> HScalar:
    return HScalar.monomial(c, e)


def lifting_operator(model: str, h_trunc: int = 12, **params) -> OpSymbol:
    """Lifting operator ``l`` (acting on the KP/BKP one-point function) of a named model.

    Exponential eigenvalues are expanded to hbar order ``h_trunc``.
    """
    H = h_trunc
    m = model.lower()
    if m in ("vacuum", "vacuum_b"):
        return op_z(1)
    if m == "simple_hurwitz":
        return op_exp_euler(HScalar({1: 1}, H), k=1)
    if m == "framed_vertex":
        f = Fraction(params.get("f", 0))
        if f == 0:
            return op_z(1)
        return op_exp_euler(HScalar({1: f}, H), k=1)
    if m == "monotone_hurwitz":
        # (1 + hbar z d) z
        return OpSymbol({1: lambda n: HScalar({0: 1, 1: n + 1})}, name="monotone")
    if m == "dessins":
        # z + hbar z d
        return OpSymbol({1: _const(1), 0: lambda n: HScalar({1: n})}, name="dessins")
    if m == "r_spin":
        r = int(params["r"])
        return OpSymbol({1: _const(1), -r: lambda n: HScalar({1: -(n + Fraction(1 - r, 2))})},
                        name=f"r_spin({r})")
    if m == "bgw":
        # z - (hbar/2) z d
        return OpSymbol({1: _const(1), 0: lambda n: HScalar({1: Fraction(-n, 2)})}, name="bgw")
    if m == "spin_hurwitz":
        r = int(params.get("r", 1))
        if r < 1:
            raise ValueError("spin_hurwitz needs r >= 1")

        def weight(k):
            # odd extension of k^(r+1)/(r+1); for even r this is the polynomial itself
            w = Fraction(abs(k) ** (r + 1), r + 1)
            return w if k >= 0 else -w

        def expo(n):
            return HScalar({r: weight(n) - weight(n + 1) + weight(1)}, H)

        return OpSymbol({1: lambda n: hs_exp(expo(n))}, name=f"spin_hurwitz({r})")
    if m == "gkm":
        return gkm_lifting(params["V"], params.get("order", 12))
    raise ValueError(f"no lifting operator for model {model!r}")


def poly_derivative(coeffs: Sequence) -> list:
    return [c * k for k, c in enumerate(coeffs)][1:]


def gkm_lifting(V: Sequence, depth: int) -> OpSymbol:
    """``z - (hbar/x') d + hbar x''/(2 x'^2)`` with ``x = V'``; series known to ``depth`` shifts below."""
    x = poly_derivative([Fraction(c) for c in V])
    xp = poly_derivative(x)
    xpp = poly_derivative(xp)
    if len(xp) < 1 or not any(xp):
        raise ValueError("potential must have degree >= 3")
    deg = max(k for k, c in enumerate(xp) if c)
    xp_s = ZSeries({k: c for k, c in enumerate(xp) if c})
    lo = -deg - depth
    inv_xp = xp_s.inv(lo=lo)
    inv_xp2 = (inv_xp * inv_xp).restrict(lo - deg)
    xpp_s = ZSeries({k: c for k, c in enumerate(xpp) if c}) if any(xpp) else ZSeries({})
    corr = (xpp_s * inv_xp2).scale(Fraction(1, 2))
    first = op_compose(op_multiply_series(inv_xp), op_derivative())
    out = op_add(op_z(1), op_scale(first, _hbar(-1)))
    out = op_add(out, op_scale(op_multiply_series(corr), _hbar(1)))
    out.name = "gkm"
    return out
