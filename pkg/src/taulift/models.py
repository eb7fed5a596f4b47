"""Registry of concrete tau-functions: lifting operators, one-point data, closed forms.

Every entry is built from explicit series in ``hbar``.  Exponentials and
``1/sinh`` factors are expanded exactly to a working order that exceeds the
requested ``h_trunc`` by a margin covering the poles in ``hbar``; results are
truncated back to ``h_trunc`` before they are returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Optional

from .errors import BadParams, NotAvailable, UnknownModel
from .fock import BogoliubovBKP
from .scalar import HScalar, ONE, ZERO, hs_exp
from .series import ZSeries
from . import solver
from .weylop import OpSymbol, gkm_lifting, lifting_operator, op_antisym, poly_derivative

HALF = Fraction(1, 2)


@dataclass
class ModelSpec:
    name: str
    hierarchy: str  # "KP" or "BKP"
    params: dict
    h_trunc: int
    lifting: OpSymbol
    one_point: Callable[[int], tuple]
    closed_two_point: Optional[Callable[[int], object]] = None
    known_affine: Optional[Callable[[int, int], HScalar]] = None
    margin: int = 0
    description: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def equation_operator(self) -> OpSymbol:
        """``l`` for KP, its anti-symmetrization for BKP."""
        if self.hierarchy == "BKP":
            return op_antisym(self.lifting)
        return self.lifting

    def solve(self, window: int):
        Psi, Psi2 = self.one_point(window + 1 if self.hierarchy == "KP" else window)
        if self.hierarchy == "KP":
            return solver.solve_two_point_kp(self.lifting, Psi, Psi2, window, self.h_trunc)
        return solver.solve_two_point_bkp(self.equation_operator, Psi, Psi2, window, self.h_trunc)


OUT_OF_SCOPE = {
    "gw_pr": "gw_Pr (orbifold Gromov-Witten theory of P[r]) is out of scope: its one-point "
             "functions carry exp((z/hbar) ln z) and Gamma-function prefactors, which are not "
             "Laurent series in z^-1 over Q((hbar)).",
}


# ---------------------------------------------------------------------------
# exact helpers

def _e(c: Fraction, T: int) -> HScalar:
    """exp(c * hbar) to order T."""
    if not c:
        return ONE
    return hs_exp(HScalar({1: c}, T))


def _e_pow(c: Fraction, r: int, T: int) -> HScalar:
    """exp(c * hbar^r) to order T."""
    if not c:
        return ONE
    return hs_exp(HScalar({r: c}, T))


def _hinv(k: int) -> HScalar:
    return HScalar({-k: 1})


def _sinh_half(n: int, T: int) -> HScalar:
    """sinh(n hbar / 2) to order T."""
    terms = {}
    x = Fraction(n, 2)
    k = 1
    while k <= T:
        terms[k] = x ** k / factorial(k)
        k += 2
    return HScalar(terms, T)


def _qfact_inv(n: int, T: int) -> HScalar:
    """1/[n]! with [j] = sinh(j hbar/2); valuation -n, accurate to order T."""
    p = ONE
    for j in range(1, n + 1):
        p = p * _sinh_half(j, T + 2 * n + 2)
    return p.inv(T) if n else ONE


def _finish(s: ZSeries, T: int) -> ZSeries:
    return s.map_coeffs(lambda c: c.truncate(T))


def _series(coef: Callable[[int], HScalar], N: int, T: int, top_terms=None) -> ZSeries:
    terms = dict(top_terms or {})
    for k in range(0, N + 1):
        if -k in terms:
            continue
        terms[-k] = coef(k).truncate(T)
    return ZSeries(terms, lo=-N)


# ---------------------------------------------------------------------------
# KP models

def _vacuum(params, H):
    def one(N):
        return ZSeries({0: 1}, lo=-N), ZSeries({0: 1}, lo=-N)
    return dict(hierarchy="KP", lifting=lifting_operator("vacuum", H), one_point=one,
                known_affine=lambda i, j: ZERO, description="trivial tau-function, b = 0")


def _simple_hurwitz(params, H):
    M = H + 24

    def one(N):
        T = H + N + 2
        psi = _series(lambda k: _e(Fraction(k * k - k, 2), M) * _hinv(k).scale(Fraction(1, factorial(k))), N, T)
        dual = _series(lambda k: _e(-Fraction(k * k - k, 2), M) * _hinv(k).scale(
            Fraction((-1) ** k, factorial(k))), N, T)
        return psi, dual

    def known(n, m):
        return (_e(Fraction(m * (m + 1) - n * (n + 1), 2), M) * _hinv(m + n + 1).scale(
            Fraction((-1) ** n, (m + n + 1) * factorial(m) * factorial(n)))).truncate(H)

    return dict(hierarchy="KP", lifting=lifting_operator("simple_hurwitz", M), one_point=one,
                known_affine=known, description="simple Hurwitz numbers")


def _framed_vertex(params, H):
    f = Fraction(params.get("f", 0))
    M = H + 40

    def one(N):
        T = H + 3 * N + 4

        def c(k, sign):
            g = Fraction(2 * f + 1, 4) * k * (k - 1)
            return (_e(sign * g, T + 2 * k + 2) * _qfact_inv(k, T + 2 * k + 2)).truncate(T)

        # wave function carries e^{+g}, its dual (-1)^k e^{-g}
        psi = _series(lambda k: c(k, 1), N, T)
        dual = _series(lambda k: c(k, -1).scale((-1) ** k), N, T)
        return psi, dual

    def known(n, m):
        T = H + 4 * (m + n + 1)
        num = _e(Fraction(2 * f + 1, 4) * (m + n + 1) * (m - n), T + 4 * (m + n + 1)).scale((-1) ** n)
        den = _sinh_half(m + n + 1, T + 4 * (m + n + 1)).inv(T + 2 * (m + n + 1))
        return (num * den * _qfact_inv(m, T) * _qfact_inv(n, T)).truncate(H)

    return dict(hierarchy="KP", lifting=lifting_operator("framed_vertex", M, f=f), one_point=one,
                known_affine=known, description="framed one-leg vertex, framing f")


def _prod_inv(js, T) -> HScalar:
    p = ONE
    for j in js:
        if j:
            p = p * HScalar({0: 1, 1: j}).inv(T)
    return p.truncate(T) if any(js) else ONE


def _monotone(params, H):
    def one(N):
        T = H + N + 2
        psi = _series(lambda k: ONE if k == 0 else (_prod_inv([-j for j in range(1, k)], T + k) * _hinv(k)
                                                    .scale(Fraction(1, factorial(k)))), N, T)
        dual = _series(lambda k: ONE if k == 0 else (_prod_inv(list(range(1, k)), T + k) * _hinv(k)
                                                     .scale(Fraction((-1) ** k, factorial(k)))), N, T)
        return psi, dual

    def known(n, m):
        # u-index n, v-index m
        T = H + n + m + 1
        return (_prod_inv(list(range(-m, n + 1)), T) * _hinv(m + n + 1).scale(
            Fraction((-1) ** n, (m + n + 1) * factorial(m) * factorial(n)))).truncate(H)

    return dict(hierarchy="KP", lifting=lifting_operator("monotone_hurwitz", H), one_point=one,
                known_affine=known, description="monotone Hurwitz numbers")


def _dessins(params, H):
    al = Fraction(params.get("alpha", 2))
    be = Fraction(params.get("beta", 3))

    def poch(js):
        p = ONE
        for j in js:
            p = p * HScalar({0: al, 1: j}) * HScalar({0: be, 1: j})
        return p

    def one(N):
        T = H + N + 2
        # dual: hbar -> -hbar
        psi = _series(lambda k: poch(range(k)) * _hinv(k).scale(Fraction(1, factorial(k))), N, T)
        dual = _series(lambda k: poch(range(0, -k, -1)) * _hinv(k).scale(
            Fraction((-1) ** k, factorial(k))), N, T)
        return psi, dual

    def known(n, m):
        return (poch(range(-n, m + 1)) * _hinv(m + n + 1).scale(
            Fraction((-1) ** n, (m + n + 1) * factorial(m) * factorial(n)))).truncate(H)

    return dict(hierarchy="KP", lifting=lifting_operator("dessins", H), one_point=one,
                known_affine=known, description="Grothendieck dessins d'enfants")


def _r_spin(params, H):
    r = int(params.get("r", 2))
    if r < 2:
        raise BadParams("r_spin needs an integer r >= 2")
    l = lifting_operator("r_spin", H, r=r)
    x = [0] * r + [Fraction(1, r)]

    def one(N):
        return (solver.solve_one_point_qc(l, x, False, N, H),
                solver.solve_one_point_qc(l, x, True, N, H))

    return dict(hierarchy="KP", lifting=l, one_point=one,
                closed_two_point=lambda N: solver.rspin_closed_two_point(r, N, H),
                description=f"r-spin intersection numbers, r = {r}", extra={"x": x})


DEFAULT_V = (0, 0, 0, Fraction(1, 6), Fraction(1, 12))


def _gkm(params, H):
    V = params.get("V", DEFAULT_V)
    if isinstance(V, str):
        V = [Fraction(c) for c in V.split(",")]
    try:
        V = [Fraction(c) for c in V]
    except (TypeError, ValueError) as exc:
        raise BadParams(f"GKM potential must be a list of rationals: {exc}") from exc
    if len(V) < 4 or not V[-1]:
        raise BadParams("GKM potential must have degree >= 3")
    x = poly_derivative(V)
    depth = int(params.get("depth", 40))
    l = gkm_lifting(V, depth)

    def one(N):
        if depth < N + 4 * len(x):
            lift = gkm_lifting(V, N + 4 * len(x))
        else:
            lift = l
        return (solver.solve_one_point_qc(lift, x, False, N, H),
                solver.solve_one_point_qc(lift, x, True, N, H))

    def closed(N):
        Psi, Psi_star = one(N + 2 * len(x) + 2)
        return solver.gkm_closed_two_point(V, Psi, Psi_star, N, H, l)

    return dict(hierarchy="KP", lifting=l, one_point=one, closed_two_point=closed,
                description="generalized Kontsevich model", extra={"x": x, "V": V})


# ---------------------------------------------------------------------------
# BKP models

def _vacuum_b(params, H):
    def one(N):
        return ZSeries({0: HALF}, lo=-N), ZSeries({1: -1}, lo=-N)
    return dict(hierarchy="BKP", lifting=lifting_operator("vacuum_b", H), one_point=one,
                known_affine=lambda i, j: ZERO, description="trivial BKP tau-function, a = 0")


def _df2(n: int) -> int:
    p = 1
    for j in range(1, 2 * n, 2):
        p *= j
    return p


def bgw_psi_coeff(n: int) -> Fraction:
    """Coefficient of hbar^n z^-n in the first BGW one-point function."""
    if n == 0:
        return HALF
    return Fraction((-1) ** n * _df2(n) ** 2, 2 ** (3 * n + 1) * factorial(n))


def bgw_tpsi_coeff(n: int) -> Fraction:
    """Coefficient of hbar^(n+1) z^-n in the second BGW one-point function (n >= 1)."""
    return Fraction(-2 * (-1) ** n * (n - 1) * _df2(n) ** 2, 2 ** (3 * n + 5) * (n + 1) * factorial(n))


def _bgw(params, H):
    def one(N):
        psi = solver.solve_one_point_bgw(N, H)
        t = {1: HScalar.const(-1), 0: HScalar({1: Fraction(1, 16)})}
        for n in range(1, N + 1):
            t[-n] = HScalar({n + 1: bgw_tpsi_coeff(n)}).truncate(H)
        return psi, ZSeries(t, lo=-N)

    return dict(hierarchy="BKP", lifting=lifting_operator("bgw", H), one_point=one,
                closed_two_point=lambda N: solver.bgw_closed_two_point(N, H),
                description="Brezin-Gross-Witten model")


def _spin_hurwitz(params, H):
    r = int(params.get("r", 1))
    if r < 1:
        raise BadParams("spin_hurwitz needs an integer r >= 1")
    M = H + 24

    def w(k):
        return Fraction(k ** (r + 1), r + 1)

    def a(n, m):
        if n == m:
            return ZERO
        if n == 0 or m == 0:
            k = n + m
            v = (_e_pow(w(k), r, M) * _hinv(k)).scale(Fraction(1, 2 * factorial(k)))
            return (v if n == 0 else -v).truncate(H)
        v = (_e_pow(w(m) + w(n), r, M) * _hinv(m + n)).scale(
            Fraction(m - n, 4 * factorial(m) * factorial(n) * (m + n)))
        return v.truncate(H)

    def one(N):
        T = H + N + 2
        psi = {0: HScalar.const(HALF)}
        for n in range(1, N + 1):
            psi[-n] = (_e_pow(w(n), r, M) * _hinv(n)).scale(Fraction((-1) ** n, 2 * factorial(n))).truncate(T)
        t = {1: HScalar.const(-1), 0: (_e_pow(Fraction(1, r + 1), r, M) * _hinv(1)).scale(HALF).truncate(T)}
        for n in range(1, N + 1):
            t[-n] = (_e_pow(w(n) + Fraction(1, r + 1), r, M) * _hinv(n + 1)).scale(
                Fraction(-(-1) ** n * (n - 1), 2 * factorial(n + 1))).truncate(T)
        return ZSeries(psi, lo=-N), ZSeries(t, lo=-N)

    return dict(hierarchy="BKP", lifting=lifting_operator("spin_hurwitz", M, r=r), one_point=one,
                known_affine=a, description=f"spin Hurwitz numbers, completed (r+1)-cycles, r = {r}")


REGISTRY: dict[str, Callable] = {
    "vacuum": _vacuum,
    "simple_hurwitz": _simple_hurwitz,
    "framed_vertex": _framed_vertex,
    "monotone_hurwitz": _monotone,
    "dessins": _dessins,
    "r_spin": _r_spin,
    "gkm": _gkm,
    "vacuum_b": _vacuum_b,
    "bgw": _bgw,
    "spin_hurwitz": _spin_hurwitz,
}

DEFAULT_PARAMS = {
    "framed_vertex": {"f": 0},
    "dessins": {"alpha": 2, "beta": 3},
    "r_spin": {"r": 2},
    "spin_hurwitz": {"r": 1},
}

_ALLOWED = {
    "framed_vertex": {"f"},
    "dessins": {"alpha", "beta"},
    "r_spin": {"r"},
    "gkm": {"V", "depth"},
    "spin_hurwitz": {"r"},
}


def model_names() -> list[str]:
    return list(REGISTRY)


def model_instantiate(name: str, params: dict | None = None, h_trunc: int = 12) -> ModelSpec:
    key = name.lower()
    if key in OUT_OF_SCOPE:
        raise UnknownModel(OUT_OF_SCOPE[key])
    if key not in REGISTRY:
        raise UnknownModel(f"unknown model {name!r}; known: {', '.join(REGISTRY)}")
    p = dict(DEFAULT_PARAMS.get(key, {}))
    p.update(params or {})
    extra_keys = set(p) - _ALLOWED.get(key, set())
    if extra_keys:
        raise BadParams(f"model {key} takes no parameter(s) {sorted(extra_keys)}")
    if h_trunc < 1:
        raise BadParams("h_trunc must be >= 1")
    try:
        fields = REGISTRY[key](p, h_trunc)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        if isinstance(exc, BadParams):
            raise
        raise BadParams(f"bad parameters for {key}: {exc}") from exc
    spec = ModelSpec(name=key, params=p, h_trunc=h_trunc, **fields)
    if not spec.lifting.terms.get(1):
        raise BadParams(f"lifting operator of {key} has no shift-1 term")
    return spec


def model_one_points(m: ModelSpec, window: int):
    return m.one_point(window)


def model_known_affine(m: ModelSpec, i: int, j: int) -> HScalar:
    if m.known_affine is None:
        raise NotAvailable(f"model {m.name} has no closed-form affine coordinates")
    return m.known_affine(i, j)


def known_bkp_state(m: ModelSpec, window: int) -> BogoliubovBKP:
    return BogoliubovBKP.from_upper({(n, k): m.known_affine(n, k)
                                     for n in range(window + 1) for k in range(n + 1, window + 1 - n)})
