"""Order-by-order solvers for one- and two-point functions.

One-point functions are fixed by an operator equation ``E Psi = 0`` whose
coefficient recursion is triangular.  Two-point functions solve

* KP:   ``(l*_u - l_v) Psi(u, v) = Psi*(u) Psi(v)``
* BKP:  ``(lt_u + lt_v) PsiB(u, v) = PsiB(u) tPsiB(v) - PsiB(v) tPsiB(u)``

by matching one coefficient per unknown; every equation that the recursion did
not consume is re-checked afterwards on the whole certified window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (AntisymmetryViolated, InconsistentData, SingularPivot, WindowExhausted,
                     ZeroInverse)
from .fock import BogoliubovBKP, BogoliubovKP, two_point_assemble
from .scalar import HScalar, ONE, ZERO
from .series import NEG_INF, BiSeries, ZSeries, bs_inverse_dominant_u, bs_separable_product, \
    kernel_expand
from .weylop import (OpSymbol, lifting_operator, op_add, op_adjoint, op_apply, op_poly, op_scale,
                     op_z)

HALF = Fraction(1, 2)
PIVOT_SLACK = 64


@dataclass(frozen=True)
class SolveReport:
    result: BiSeries
    residual_max_window: dict
    consistency_rows_checked: int
    coords: object = None
    residual: BiSeries | None = field(default=None, repr=False)


def _inv(c: HScalar, h_trunc: int, what: str) -> HScalar:
    if not c.is_unit():
        raise SingularPivot(f"pivot {what} vanishes")
    try:
        # generous cap: the right-hand sides carry poles in hbar
        return c.inv(h_trunc + PIVOT_SLACK)
    except ZeroInverse as exc:
        raise SingularPivot(f"pivot {what} is not invertible: {exc}") from exc


def prune(A: OpSymbol, ns) -> OpSymbol:
    """Drop shifts whose eigen-function vanishes on every sample point."""
    ns = list(ns)
    keep = {s: f for s, f in A.terms.items() if any(not f(n).is_zero() for n in ns)}
    return OpSymbol(keep, A.floor, A.name)


def first_nonzero(x, lo_a=NEG_INF, lo_d=NEG_INF):
    """First nonzero coefficient of a residual as ``(key, hbar_exponent)``, or None."""
    if isinstance(x, ZSeries):
        for e, c in sorted(x.items(), key=lambda t: -t[0]):
            if not c.is_zero():
                return e, c.leading()[0]
        return None
    for k in sorted(x.keys(), key=lambda t: (-t[0], -t[1])):
        c = x.coeff(*k)
        if x.in_window(*k) and k[0] >= lo_a and k[0] + k[1] >= lo_d and not c.is_zero():
            return k, c.leading()[0]
    return None


# ---------------------------------------------------------------------------
# one-point functions

def curve_operator(l: OpSymbol, x: Sequence, dual: bool = False) -> OpSymbol:
    """``x(l) - x(z)`` (or with ``l*`` when ``dual``) for polynomial coefficients ``x`` (low to high)."""
    L = op_adjoint(l) if dual else l
    return op_add(op_poly(x, L), op_scale(op_poly(x, op_z(1)), -1))


def solve_annihilated(E: OpSymbol, window: int, h_trunc: int, normalization=1) -> ZSeries:
    """The series ``c0 + c1 z^-1 + ... + cN z^-N`` with ``E Psi = 0`` and ``c0 = normalization``."""
    N = window
    ns = [-j for j in range(N + 1)]
    E = prune(E, ns)
    if E.is_empty():
        raise SingularPivot("operator vanishes identically; the equation is 0 = 0")
    top = E.s_max
    if E.floor is not None and top - E.floor < N:
        raise WindowExhausted(f"operator known only to shift {E.floor}, need {top - N}")
    c0 = HScalar.coerce(normalization)
    if not E.eigen(top, 0).is_zero():
        raise InconsistentData("normalization is incompatible with the equation at z^0")
    coeffs = {0: c0}
    for k in range(1, N + 1):
        # coefficient of z^(top - k) in E Psi
        acc = ZERO
        for s, f in E.terms.items():
            j = k - (top - s)
            if s == top or j < 0:
                continue
            acc = acc + f(-j) * coeffs[j]
        piv = _inv(E.eigen(top, -k), h_trunc, f"at z^{-k}")
        coeffs[k] = (-(acc * piv)).truncate(h_trunc)
    Psi = ZSeries({-k: c for k, c in coeffs.items()}, lo=-N)
    res = op_apply(E, Psi)
    bad = first_nonzero(res)
    if bad is not None:
        raise InconsistentData(f"one-point residual nonzero at z^{bad[0]}, hbar^{bad[1]}")
    return Psi


def solve_one_point_qc(l: OpSymbol, x: Sequence, dual: bool = False, window: int = 10,
                       h_trunc: int = 12, normalization=1) -> ZSeries:
    return solve_annihilated(curve_operator(l, x, dual), window, h_trunc, normalization)


def one_point_residual(l: OpSymbol, x: Sequence, Psi: ZSeries, dual: bool = False) -> ZSeries:
    E = prune(curve_operator(l, x, dual), [e for e in Psi.keys()] + [0])
    return op_apply(E, Psi)


def bgw_operator(l: OpSymbol | None = None, h_trunc: int = 12) -> OpSymbol:
    """``l^2 - z l + (hbar/2) l + hbar^2/16``."""
    l = l or lifting_operator("bgw", h_trunc)
    h = HScalar({1: HALF})
    from .weylop import op_compose, op_identity
    E = op_add(op_compose(l, l), op_scale(op_compose(op_z(1), l), -1))
    E = op_add(E, op_scale(l, h))
    return op_add(E, op_scale(op_identity(), HScalar({2: Fraction(1, 16)})))


def solve_one_point_bgw(window: int = 10, h_trunc: int = 12) -> ZSeries:
    return solve_annihilated(bgw_operator(h_trunc=h_trunc), window, h_trunc, HALF)


# ---------------------------------------------------------------------------
# KP two-point function

def _need(series: ZSeries, lo: int, name: str):
    if series.lo > lo:
        raise WindowExhausted(f"{name} known to z^{series.lo}, need z^{lo}")


def residual_kp(l: OpSymbol, Psi: ZSeries, Psi_star: ZSeries, candidate: BiSeries) -> BiSeries:
    ls = op_adjoint(l)
    lhs = op_apply(ls, candidate, "u") - op_apply(l, candidate, "v")
    return lhs - bs_separable_product(Psi_star, Psi)


def schedule_cells(N: int, first: int, schedule: str = "rows") -> list[tuple[int, int]]:
    """Evaluation order of the unknowns ``(i, j)``, ``i >= first``, ``i + j <= N``.

    Every order listed here respects the dependency structure: an unknown
    needs only smaller ``i``, or ``(i - 1, j + 1)`` on the same anti-diagonal.
    """
    cells = [(i, j) for i in range(first, N + 1) for j in range(N + 1 - i)]
    if schedule == "rows":
        return cells
    if schedule == "rows-reversed":
        return sorted(cells, key=lambda c: (c[0], -c[1]))
    if schedule == "diagonals":
        return sorted(cells, key=lambda c: (c[0] + c[1], c[0]))
    raise ValueError(f"unknown schedule {schedule!r}")


def solve_two_point_kp(l: OpSymbol, Psi: ZSeries, Psi_star: ZSeries, window: int = 8,
                       h_trunc: int = 12, schedule: str = "rows") -> SolveReport:
    """``b[i, j]`` for ``i + j <= window``; row 0 comes from ``Psi``, the rest from the recursion."""
    N = window
    _need(Psi, -N - 1, "wave function")
    _need(Psi_star, -N - 1, "dual wave function")
    if l.floor is not None and l.floor > -N - 2:
        raise WindowExhausted(f"lifting operator known only to shift {l.floor}")
    ls = op_adjoint(l)
    kern = kernel_expand("KP", -N - 3)
    K = op_apply(ls, kern, "u") - op_apply(l, kern, "v")
    rhs = bs_separable_product(Psi_star, Psi)
    b: dict[tuple[int, int], HScalar] = {}
    for j in range(N + 1):
        b[(0, j)] = Psi.coeff(-j - 1).truncate(h_trunc)

    def get(i, j):
        if i < 0 or j < 0:
            return ZERO
        return b[(i, j)]

    pivots = {i: _inv(ls.eigen(1, -i - 1), h_trunc, f"b[{i},*]") for i in range(1, N + 1)}
    for i, j in schedule_cells(N, 1, schedule):
        piv = pivots[i]
        a, bb = -i, -j - 1
        acc = rhs.coeff(a, bb) - K.coeff(a, bb)
        for s, f in ls.terms.items():
            if s == 1:
                continue
            ip = i + s - 1
            if ip >= 0:
                acc = acc - f(-ip - 1) * get(ip, j)
        for s, f in l.terms.items():
            jp = j + s
            if jp >= 0:
                acc = acc + f(-jp - 1) * get(i - 1, jp)
        b[(i, j)] = (acc * piv).truncate(h_trunc)
    coords = BogoliubovKP({k: c for k, c in b.items() if not c.is_zero()})
    result = two_point_assemble(coords, N)
    res = residual_kp(l, Psi, Psi_star, result)
    lo_a, lo_d = -N, -N - 1
    bad = first_nonzero(res, lo_a, lo_d)
    if bad is not None:
        (ka, kb), e = bad
        raise InconsistentData(f"KP equation fails at u^{ka} v^{kb}, hbar^{e}")
    used = sum(1 for i in range(1, N + 1) for j in range(N + 1 - i))
    checked = sum(1 for k in res.keys() if res.in_window(*k) and k[0] >= lo_a and sum(k) >= lo_d)
    total = sum(1 for a in range(lo_a, 1) for bb in range(lo_d - a, 1))
    return SolveReport(result, {"a_min": lo_a, "d_min": lo_d}, max(total - used, checked - used),
                       coords, res)


# ---------------------------------------------------------------------------
# BKP two-point function

def _bkp_rhs(PsiB: ZSeries, tPsiB: ZSeries) -> BiSeries:
    return bs_separable_product(PsiB, tPsiB) - bs_separable_product(tPsiB, PsiB)


def residual_bkp(lt: OpSymbol, PsiB: ZSeries, tPsiB: ZSeries, candidate: BiSeries) -> BiSeries:
    lhs = op_apply(lt, candidate, "u") + op_apply(lt, candidate, "v")
    return lhs - _bkp_rhs(PsiB, tPsiB)


def solve_two_point_bkp(lt: OpSymbol, PsiB: ZSeries, tPsiB: ZSeries, window: int = 8,
                        h_trunc: int = 12, schedule: str = "rows") -> SolveReport:
    """Coefficients ``C[p, q]`` of ``u^-p v^-q`` for ``p + q <= window``; rows 0 and 1 are data."""
    N = window
    _need(PsiB, -N, "first one-point function")
    _need(tPsiB, -N, "second one-point function")
    if lt.floor is not None and lt.floor > -N - 1:
        raise WindowExhausted(f"lifting operator known only to shift {lt.floor}")
    kern = kernel_expand("BKP", -N - 2)
    K = op_apply(lt, kern, "u") + op_apply(lt, kern, "v")
    rhs = _bkp_rhs(PsiB, tPsiB)
    C: dict[tuple[int, int], HScalar] = {}
    for q in range(1, N + 1):
        C[(0, q)] = PsiB.coeff(-q).truncate(h_trunc)
    for q in range(N):
        C[(1, q)] = tPsiB.coeff(-q).truncate(h_trunc)

    def get(p, q):
        if p < 0 or q < 0 or (p, q) == (0, 0):
            return ZERO
        return C[(p, q)]

    pivots = {p: _inv(lt.eigen(1, -p), h_trunc, f"C[{p},*]") for p in range(2, N + 1)}
    for p, q in schedule_cells(N, 2, schedule):
        piv = pivots[p]
        a, bb = -p + 1, -q
        acc = rhs.coeff(a, bb) - K.coeff(a, bb)
        for s, f in lt.terms.items():
            pp = p - 1 + s
            if s != 1 and pp >= 0:
                acc = acc - f(-pp) * get(pp, q)
            qp = q + s
            if qp >= 0:
                acc = acc - f(-qp) * get(p - 1, qp)
        C[(p, q)] = (acc * piv).truncate(h_trunc)
    checked = 0
    for (p, q), c in C.items():
        if (q, p) in C:
            if not (c + C[(q, p)]).is_zero():
                raise AntisymmetryViolated(f"C[{p},{q}] != -C[{q},{p}]")
            checked += 1
    a = {}
    for (p, q), c in C.items():
        if c.is_zero():
            continue
        sign = (-1) ** ((p + q) % 2)
        a[(p, q)] = c.scale(sign) if p == 0 or q == 0 else c.scale(Fraction(sign, 2))
    coords = BogoliubovBKP(a)
    result = two_point_assemble(coords, N)
    res = residual_bkp(lt, PsiB, tPsiB, result)
    lo = -N + 1
    bad = first_nonzero(res, lo, lo)
    if bad is not None:
        (ka, kb), e = bad
        raise InconsistentData(f"BKP equation fails at u^{ka} v^{kb}, hbar^{e}")
    used = sum(1 for p in range(2, N + 1) for q in range(N + 1 - p))
    total = sum(1 for x in range(lo, 2) for y in range(lo - x, 2))
    return SolveReport(result, {"a_min": lo, "d_min": lo}, checked + total - used, coords, res)


# ---------------------------------------------------------------------------
# closed formulas

def _restrict(x: BiSeries, a_lo: int, d_lo: int) -> BiSeries:
    if x.a_lo > a_lo or x.d_lo > d_lo:
        raise WindowExhausted(f"closed formula certified on a>={x.a_lo}, a+b>={x.d_lo}; "
                              f"need a>={a_lo}, a+b>={d_lo}")
    keep = {k: c for k, c in x.items() if k[0] >= a_lo and sum(k) >= d_lo}
    return BiSeries(keep, a_lo, d_lo, x.a_hi, x.d_hi)


def _w_closed(l: OpSymbol, x: Sequence, Psi: ZSeries, Psi_star: ZSeries, window: int,
              h_trunc: int) -> BiSeries:
    """``W(l*_u, l_v) Psi*(u) Psi(v) / (x(u) - x(v))`` with ``W = (x(u) - x(v))/(u - v)``."""
    N = window
    x = [Fraction(c) for c in x]
    deg = max(k for k, c in enumerate(x) if c)
    ls = op_adjoint(l)
    base = bs_separable_product(Psi_star, Psi)
    # powers (l*_u)^a base, then l_v applied on top
    u_pows = [base]
    for _ in range(deg - 1):
        u_pows.append(op_apply(ls, u_pows[-1], "u"))
    num = None
    for k in range(1, deg + 1):
        if not x[k]:
            continue
        for a in range(k):
            t = u_pows[a]
            for _ in range(k - 1 - a):
                t = op_apply(l, t, "v")
            t = t.scale(x[k])
            num = t if num is None else num + t
    den = BiSeries({(k, 0): c for k, c in enumerate(x) if c and k}
                   | {(0, k): -c for k, c in enumerate(x) if c and k})
    inv = bs_inverse_dominant_u(den, -N - 1 - deg - 1, h_trunc)
    return _restrict(num * inv, -N - 1, -N - 2)


def gkm_closed_two_point(V: Sequence, Psi: ZSeries, Psi_star: ZSeries, window: int = 6,
                         h_trunc: int = 12, l: OpSymbol | None = None) -> BiSeries:
    from .weylop import gkm_lifting, poly_derivative
    x = poly_derivative([Fraction(c) for c in V])
    if l is None:
        l = gkm_lifting(V, window + 2 * len(x) + 4)
    return _w_closed(l, x, Psi, Psi_star, window, h_trunc)


def rspin_one_points(r: int, window: int, h_trunc: int = 12):
    l = lifting_operator("r_spin", h_trunc, r=r)
    x = [0] * r + [Fraction(1, r)]
    return (solve_one_point_qc(l, x, False, window, h_trunc),
            solve_one_point_qc(l, x, True, window, h_trunc))


def rspin_closed_two_point(r: int, window: int = 8, h_trunc: int = 12) -> BiSeries:
    l = lifting_operator("r_spin", h_trunc, r=r)
    x = [0] * r + [Fraction(1, r)]
    M = window + 2 * r + 2
    Psi, Psi_star = rspin_one_points(r, M, h_trunc)
    return _w_closed(l, x, Psi, Psi_star, window, h_trunc)


def bgw_closed_two_point(window: int = 8, h_trunc: int = 12) -> BiSeries:
    """``-2(2 l_v - 2 l_u + u - v) PsiB(u) PsiB(v) / (u + v)``."""
    N = window
    l = lifting_operator("bgw", h_trunc + 1)
    PsiB = solve_one_point_bgw(N + 3, h_trunc + 1)
    base = bs_separable_product(PsiB, PsiB)
    num = op_apply(l, base, "v").scale(2) - op_apply(l, base, "u").scale(2)
    num = num + op_apply(op_z(1), base, "u") - op_apply(op_z(1), base, "v")
    num = num.scale(-2)
    den = BiSeries({(1, 0): ONE, (0, 1): ONE})
    inv = bs_inverse_dominant_u(den, -N - 2, h_trunc)
    out = (num * inv).map_coeffs(lambda c: c.truncate(h_trunc))
    return _restrict(out, -N, -N)


def bgw_tilde_from_psi(PsiB: ZSeries, h_trunc: int = 12) -> ZSeries:
    """``-2 (l + hbar/16) PsiB``."""
    from .weylop import op_identity
    l = lifting_operator("bgw", h_trunc)
    op = op_add(l, op_scale(op_identity(), HScalar({1: Fraction(1, 16)})))
    return op_apply(op, PsiB).scale(-2)
