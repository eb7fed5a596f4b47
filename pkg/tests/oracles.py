"""Independent reference values.

Closed formulas are re-expanded here with a separate, list-free power-series
helper (dicts of exponent -> Fraction, hard cap on the exponent), so that a
bug in the package's own scalar arithmetic cannot hide behind itself.  The
1/sinh expansion uses Bernoulli numbers instead of series inversion.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from sympy import bernoulli


def mul(a: dict, b: dict, cap: int) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            if e <= cap:
                out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def prod(factors, cap: int) -> dict:
    out = {0: Fraction(1)}
    for f in factors:
        out = mul(out, f, cap)
    return out


def exp_h(c, r: int, cap: int) -> dict:
    """exp(c * h^r)."""
    c = Fraction(c)
    out = {}
    k = 0
    while r * k <= cap:
        out[r * k] = c ** k / factorial(k)
        k += 1
        if not c:
            break
    return {e: v for e, v in out.items() if v}


def geometric(j, cap: int) -> dict:
    """1 / (1 + j h)."""
    return {k: Fraction(-j) ** k for k in range(cap + 1) if j or k == 0}


def csch_half(n: int, cap: int) -> dict:
    """1 / sinh(n h / 2) = sum_k (2 - 2^(2k)) B_2k x^(2k-1) / (2k)!,  x = n h / 2."""
    x = Fraction(n, 2)
    out = {}
    k = 0
    while 2 * k - 1 <= cap:
        b = Fraction(int(bernoulli(2 * k).p), int(bernoulli(2 * k).q))
        out[2 * k - 1] = (2 - 2 ** (2 * k)) * b * x ** (2 * k - 1) / factorial(2 * k)
        k += 1
    return {e: v for e, v in out.items() if v}


def hpow(k: int) -> dict:
    return {k: Fraction(1)}


def linear(a, b) -> dict:
    """a + b h."""
    return {e: Fraction(c) for e, c in ((0, a), (1, b)) if c}


def cut(d: dict, H: int) -> dict:
    return {e: c for e, c in d.items() if e <= H and c}


# ---------------------------------------------------------------------------
# closed-form affine coordinates (u-index n, v-index m)

def simple_hurwitz_b(n: int, m: int, H: int) -> dict:
    cap = H + m + n + 1
    e = exp_h(Fraction(m * (m + 1) - n * (n + 1), 2), 1, cap)
    c = Fraction((-1) ** n, (m + n + 1) * factorial(m) * factorial(n))
    return cut(mul(e, {-(m + n + 1): c}, H), H)


def dessins_b(n: int, m: int, H: int, alpha=2, beta=3) -> dict:
    cap = H + m + n + 1
    p = prod([linear(alpha, j) for j in range(-n, m + 1)] +
             [linear(beta, j) for j in range(-n, m + 1)], cap)
    c = Fraction((-1) ** n, (m + n + 1) * factorial(m) * factorial(n))
    return cut(mul(p, {-(m + n + 1): c}, H), H)


def monotone_b(n: int, m: int, H: int) -> dict:
    cap = H + m + n + 1
    p = prod([geometric(j, cap) for j in range(-m, n + 1)], cap)
    c = Fraction((-1) ** n, (m + n + 1) * factorial(m) * factorial(n))
    return cut(mul(p, {-(m + n + 1): c}, H), H)


def framed_b(n: int, m: int, H: int, f) -> dict:
    f = Fraction(f)
    poles = (m + n + 1) + m + n
    cap = H + poles
    parts = [exp_h(Fraction(2 * f + 1, 4) * (m + n + 1) * (m - n), 1, cap),
             csch_half(m + n + 1, cap)]
    parts += [csch_half(j, cap) for j in range(1, m + 1)]
    parts += [csch_half(j, cap) for j in range(1, n + 1)]
    return cut({e: c * (-1) ** n for e, c in prod(parts, cap).items()}, H)


def spin_hurwitz_a(n: int, m: int, H: int, r: int = 1) -> dict:
    """a[n, m] with the leading hbar^-(n+m)."""
    cap = H + n + m

    def w(k):
        return Fraction(k ** (r + 1), r + 1)

    if n == m:
        return {}
    if n == 0 or m == 0:
        k = n + m
        c = Fraction(1, 2 * factorial(k)) * (1 if n == 0 else -1)
        return cut(mul(exp_h(w(k), r, cap), {-k: c}, H), H)
    c = Fraction(m - n, 4 * factorial(m) * factorial(n) * (m + n))
    return cut(mul(exp_h(w(m) + w(n), r, cap), {-(m + n): c}, H), H)


# ---------------------------------------------------------------------------
# one-point data

def double_factorial_odd(n: int) -> int:
    p = 1
    for j in range(1, 2 * n, 2):
        p *= j
    return p


def bgw_psi(n: int) -> Fraction:
    """[z^-n] of the first BGW one-point function, coefficient of hbar^n."""
    if n == 0:
        return Fraction(1, 2)
    return Fraction((-1) ** n * double_factorial_odd(n) ** 2, 2 ** (3 * n + 1) * factorial(n))


def airy_u(k: int) -> Fraction:
    """Coefficients of the large-argument Airy expansion, Gamma(3k+1/2)/(54^k k! Gamma(k+1/2))."""
    p = Fraction(1)
    for j in range(k, 3 * k):
        p *= Fraction(2 * j + 1, 2)
    return p / (54 ** k * factorial(k))


# published values of the first Airy coefficients
AIRY_U = {0: Fraction(1), 1: Fraction(5, 72), 2: Fraction(385, 10368), 3: Fraction(85085, 2239488)}


def as_dict(x, H: int) -> dict:
    """An HScalar as a plain dict, cut at H."""
    return {e: c for e, c in x.items() if e <= H}


def matches(x, ref: dict, H: int) -> bool:
    """HScalar ``x`` known to at least H and equal to ``ref`` up to H."""
    if x.trunc < H:
        return False
    return as_dict(x, H) == cut(ref, H)
