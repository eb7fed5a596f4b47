"""Free-fermion vacuum expectation values and the affine-coordinate dictionaries.

Charged fermions ``psi_k, psi*_k`` (k in Z + 1/2) and neutral fermions
``phi_i`` (i in Z).  Generating fields::

    psi(z)  = sum_k z^(k-1/2) psi_k,   psi*(z) = sum_k z^(-k-1/2) psi*_k,
    phi(z)  = sum_i z^i phi_i.

Vacuum pairings::

    <psi*_k psi_j> = [k == j > 0],   <psi_a psi*_b> = [a == b < 0],
    <phi_0 phi_0> = 1/2,             <phi_-n phi_n> = (-1)^n  (n > 0).

The last sign is the one forced by ``{phi_i, phi_j} = (-1)^i delta_{i+j,0}``
together with ``phi_-n |0> = 0``; it is also the only sign that reproduces
the expansion of ``(u - v) / (2 (u + v))``.

A Bogoliubov state ``e^A |0>`` is handled by dressing each letter,
``X -> e^-A X e^A`` (a finite sum: ``A`` is built from creators), after which
the normalized expectation value is a vacuum Wick sum over the dressed
letters.  :func:`fock_oracle_vev` computes the same numbers by acting on
explicit occupation-number states, with no contraction rule involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import (AntisymmetryViolated, BadNormalization, InconsistentData, MixedStatistics,
                     NotAdmissible, SupportTooLarge, UnbalancedCharge)
from .scalar import HScalar, ONE, ZERO
from .series import NEG_INF, BiSeries, ZSeries, kernel_expand

HALF = Fraction(1, 2)

PSI, PSI_STAR, PHI = "psi", "psi*", "phi"


@dataclass(frozen=True)
class Label:
    """One letter of a fermion word: a mode (``index``) or a field marker (``var``)."""

    kind: str
    index: Union[Fraction, int, None] = None
    var: str | None = None

    @property
    def is_field(self) -> bool:
        return self.var is not None

    @property
    def neutral(self) -> bool:
        return self.kind == PHI

    def __repr__(self):
        if self.is_field:
            return f"{self.kind}({self.var})"
        return f"{self.kind}_{self.index}"


def psi(k) -> Label:
    return Label(PSI, _half_index(k))


def psi_star(k) -> Label:
    return Label(PSI_STAR, _half_index(k))


def phi(i: int) -> Label:
    return Label(PHI, int(i))


def psi_field(var: str) -> Label:
    return Label(PSI, None, var)


def psi_star_field(var: str) -> Label:
    return Label(PSI_STAR, None, var)


def phi_field(var: str) -> Label:
    return Label(PHI, None, var)


def _half_index(k) -> Fraction:
    k = Fraction(k)
    if k.denominator != 2:
        raise ValueError(f"charged fermion modes are half-integers, got {k}")
    return k


FermionWord = Sequence[Label]


# ---------------------------------------------------------------------------
# states

@dataclass
class BogoliubovKP:
    """``A = sum b[k, i] psi*_{-i-1/2} psi_{k+1/2}`` over the stored entries."""

    b: dict = field(default_factory=dict)

    def __post_init__(self):
        self.b = {(int(k), int(i)): HScalar.coerce(c) for (k, i), c in self.b.items()
                  if not HScalar.coerce(c).is_zero()}

    def entry(self, k: int, i: int) -> HScalar:
        return self.b.get((k, i), ZERO)

    def modes(self) -> set:
        out = set()
        for k, i in self.b:
            out.add(Label(PSI, k + HALF))
            out.add(Label(PSI_STAR, -i - HALF))
        return out

    def quadratic(self):
        """``A`` as a list of (coefficient, first letter, second letter)."""
        return [(c, Label(PSI_STAR, -i - HALF), Label(PSI, k + HALF)) for (k, i), c in sorted(self.b.items())]


@dataclass
class BogoliubovBKP:
    """``A = sum a[n, m] phi_m phi_n`` with ``a[n, m] = -a[m, n]`` enforced on construction."""

    a: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (n, m), c in self.a.items():
            c = HScalar.coerce(c)
            if not c.is_zero():
                clean[(int(n), int(m))] = c
        for (n, m), c in clean.items():
            other = clean.get((m, n), ZERO)
            if n == m or not (c + other).is_zero():
                raise AntisymmetryViolated(f"a[{n},{m}] = {c!r} but a[{m},{n}] = {other!r}")
        self.a = clean

    @classmethod
    def from_upper(cls, upper: Mapping) -> "BogoliubovBKP":
        """Build from entries with ``n < m``; the lower half is filled by anti-symmetry."""
        full = {}
        for (n, m), c in upper.items():
            if n >= m:
                raise ValueError("from_upper takes entries with n < m")
            c = HScalar.coerce(c)
            full[(n, m)] = c
            full[(m, n)] = -c
        return cls(full)

    def entry(self, n: int, m: int) -> HScalar:
        return self.a.get((n, m), ZERO)

    def modes(self) -> set:
        out = set()
        for n, m in self.a:
            out.add(Label(PHI, n))
            out.add(Label(PHI, m))
        return out

    def quadratic(self):
        return [(c, Label(PHI, m), Label(PHI, n)) for (n, m), c in sorted(self.a.items())]


State = Union[None, str, BogoliubovKP, BogoliubovBKP]


# ---------------------------------------------------------------------------
# vacuum pairings and dressed letters

def vacuum_pair(x: Label, y: Label) -> Fraction:
    """``<0| x y |0>`` for two modes."""
    if x.neutral != y.neutral:
        raise MixedStatistics("charged and neutral fermions in one pairing")
    if x.neutral:
        i, j = x.index, y.index
        if i == 0 and j == 0:
            return HALF
        if j > 0 and i == -j:
            return Fraction((-1) ** j)
        return Fraction(0)
    if x.kind == PSI_STAR and y.kind == PSI:
        return Fraction(1) if x.index == y.index and y.index > 0 else Fraction(0)
    if x.kind == PSI and y.kind == PSI_STAR:
        return Fraction(1) if x.index == y.index and x.index < 0 else Fraction(0)
    return Fraction(0)


def anticommutator(x: Label, y: Label) -> Fraction:
    if x.neutral != y.neutral:
        return Fraction(0)
    if x.neutral:
        return Fraction((-1) ** (x.index % 2)) if x.index + y.index == 0 else Fraction(0)
    if {x.kind, y.kind} == {PSI, PSI_STAR} and x.index == y.index:
        return Fraction(1)
    return Fraction(0)


def _commutator_with_quadratic(letter: dict, quad) -> dict:
    """``[L, A]`` for linear ``L`` and ``A = sum c X Y``: ``[L, XY] = {L,X} Y - X {L,Y}``."""
    out: dict[Label, HScalar] = {}
    for mode, cl in letter.items():
        for c, x, y in quad:
            ax = anticommutator(mode, x)
            if ax:
                out[y] = out.get(y, ZERO) + (cl * c).scale(ax)
            ay = anticommutator(mode, y)
            if ay:
                out[x] = out.get(x, ZERO) - (cl * c).scale(ay)
    return {m: v for m, v in out.items() if not v.is_zero()}


def dress(letter: dict, quad, max_depth: int = 64) -> dict:
    """``e^-A L e^A = L + [L,A] + [[L,A],A]/2 + ...`` (terminates for creator-built ``A``)."""
    total = dict(letter)
    term = dict(letter)
    k = 0
    while term:
        k += 1
        if k > max_depth:
            raise RuntimeError("dressing series did not terminate")
        term = _commutator_with_quadratic(term, quad)
        term = {m: v.scale(Fraction(1, k)) for m, v in term.items()}
        for m, v in term.items():
            total[m] = total.get(m, ZERO) + v
    return {m: v for m, v in total.items() if not v.is_zero()}


# A dressed letter: finite part (mode -> coefficient) plus optionally a bare field.
@dataclass
class _Letter:
    kind: str
    finite: dict
    var: str | None = None  # bare field marker if not None


def _field_monomial_exp(kind: str, index) -> int:
    """Exponent of the field variable multiplying the given mode."""
    if kind == PSI:
        return int(index - HALF)
    if kind == PSI_STAR:
        return int(-index - HALF)
    return int(index)


def _field_terms_in(kind: str, modes: Iterable[Label]):
    return [m for m in modes if m.kind == kind]


def _dressed_letters(word: FermionWord, state) -> list[_Letter]:
    quad = state.quadratic() if state is not None else []
    a_modes = state.modes() if state is not None else set()
    out = []
    for lab in word:
        if not lab.is_field:
            out.append(_Letter(lab.kind, dress({lab: ONE}, quad)))
            continue
        # bare field; commutators only come from modes of the field that meet A
        finite: dict[Label, HScalar] = {}
        if quad:
            partners = set()
            for m in a_modes:
                p = _partner(m)
                if p.kind == lab.kind:
                    partners.add(p)
            for p in partners:
                mono = _mono(lab.var, _field_monomial_exp(lab.kind, p.index))
                for m, v in dress({p: ONE}, quad).items():
                    if m == p:
                        v = v - ONE
                    if not v.is_zero():
                        finite[m] = finite.get(m, _zero_bs()) + mono * v
        out.append(_Letter(lab.kind, finite, lab.var))
    return out


def _partner(m: Label) -> Label | None:
    """The field mode whose anticommutator with ``m`` is nonzero."""
    if m.kind == PHI:
        return Label(PHI, -m.index)
    if m.kind == PSI:
        return Label(PSI_STAR, m.index)
    return Label(PSI, m.index)


def _zero_bs() -> BiSeries:
    return BiSeries({})


def _mono(var: str, e: int, c=ONE) -> BiSeries:
    if var == "u":
        return BiSeries({(e, 0): c})
    if var == "v":
        return BiSeries({(0, e): c})
    raise ValueError(f"field variables must be 'u' or 'v', got {var!r}")


def _contract(x: _Letter, y: _Letter, window: int, with_series: bool):
    """``<0| x y |0>`` of two dressed letters."""
    total = _zero_bs() if with_series else ZERO
    for mx, cx in x.finite.items():
        for my, cy in y.finite.items():
            p = vacuum_pair(mx, my)
            if not p:
                continue
            if with_series:
                total = total + (_as_bs(cx) * _as_bs(cy)).scale(p)
            else:
                total = total + (cx * cy).scale(p)
    if x.var is not None:
        for my, cy in y.finite.items():
            mx = _left_partner(my)
            if mx is not None and mx.kind == x.kind:
                p = vacuum_pair(mx, my)
                if p:
                    total = total + _mono(x.var, _field_monomial_exp(x.kind, mx.index), HScalar.const(p)) * _as_bs(cy)
    if y.var is not None:
        for mx, cx in x.finite.items():
            my = _right_partner(mx)
            if my is not None and my.kind == y.kind:
                p = vacuum_pair(mx, my)
                if p:
                    total = total + _as_bs(cx) * _mono(y.var, _field_monomial_exp(y.kind, my.index), HScalar.const(p))
    if x.var is not None and y.var is not None:
        if (x.var, y.var) != ("u", "v"):
            raise ValueError("field markers must appear as u before v")
        if (x.kind == PHI) != (y.kind == PHI):
            raise MixedStatistics("charged and neutral fields in one word")
        if x.kind == PHI:
            total = total + kernel_expand("BKP", -window)
        elif {x.kind, y.kind} == {PSI, PSI_STAR}:
            total = total + kernel_expand("KP", -window - 1)
    return total


def _left_partner(my: Label) -> Label | None:
    """Mode x with ``<x my> != 0``."""
    if my.kind == PHI:
        return Label(PHI, -my.index) if my.index >= 0 else None
    if my.kind == PSI:
        return Label(PSI_STAR, my.index) if my.index > 0 else None
    return Label(PSI, my.index) if my.index < 0 else None


def _right_partner(mx: Label) -> Label | None:
    """Mode y with ``<mx y> != 0``."""
    if mx.kind == PHI:
        return Label(PHI, -mx.index) if mx.index <= 0 else None
    if mx.kind == PSI_STAR:
        return Label(PSI, mx.index) if mx.index > 0 else None
    return Label(PSI_STAR, mx.index) if mx.index < 0 else None


def _as_bs(c) -> BiSeries:
    return c if isinstance(c, BiSeries) else BiSeries({(0, 0): c})


# ---------------------------------------------------------------------------
# Pfaffian / determinant over a commutative ring of HScalars or BiSeries

def pfaffian(M: Sequence[Sequence], zero=ZERO):
    """Pfaffian of an anti-symmetric matrix, by expansion along the first row."""
    n = len(M)
    if n % 2:
        return zero

    def rec(idx: tuple):
        if not idx:
            return None  # stands for 1
        i = idx[0]
        acc = zero
        for pos in range(1, len(idx)):
            j = idx[pos]
            mij = M[i][j]
            if _is_zero(mij):
                continue
            rest = idx[1:pos] + idx[pos + 1:]
            sub = rec(rest)
            term = mij if sub is None else mij * sub
            acc = acc + term if pos % 2 == 1 else acc - term
        return acc

    out = rec(tuple(range(n)))
    return HScalar.const(1) if out is None else out


def determinant(B: Sequence[Sequence], zero=ZERO):
    """Leibniz-formula determinant (the matrices here are at most 4x4)."""
    n = len(B)
    if n == 0:
        return HScalar.const(1)
    acc = zero
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        term = None
        for r, c in enumerate(perm):
            e = B[r][c]
            if _is_zero(e):
                term = None
                break
            term = e if term is None else term * e
        else:
            acc = acc + term if sign > 0 else acc - term
    return acc


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _is_zero(x) -> bool:
    if isinstance(x, HScalar):
        return x.is_zero() and x.is_exact
    if isinstance(x, BiSeries):
        return len(x) == 0 and x.a_lo == NEG_INF and x.d_lo == NEG_INF
    return not x


def _check_word(word: FermionWord, state):
    if not word:
        return None
    neutral = {lab.neutral for lab in word}
    if len(neutral) > 1:
        raise MixedStatistics("word mixes charged and neutral fermions")
    is_neutral = neutral.pop()
    if isinstance(state, BogoliubovKP) and is_neutral or isinstance(state, BogoliubovBKP) and not is_neutral:
        raise MixedStatistics("word statistics do not match the state")
    if not is_neutral:
        n_star = sum(1 for lab in word if lab.kind == PSI_STAR)
        if 2 * n_star != len(word):
            raise UnbalancedCharge(f"word has {n_star} psi* and {len(word) - n_star} psi")
    vars_ = [lab.var for lab in word if lab.is_field]
    if len(vars_) != len(set(vars_)):
        raise ValueError("each field variable may appear once")
    return is_neutral


def contraction_matrix(word: FermionWord, state: State = None, window: int = 8):
    """Anti-symmetric matrix ``M[i][j] = <X_i X_j>`` (i < j) of dressed letters."""
    if isinstance(state, str):
        state = None
    letters = _dressed_letters(word, state)
    with_series = any(lab.is_field for lab in word)
    zero = _zero_bs() if with_series else ZERO
    n = len(letters)
    M = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            c = _contract(letters[i], letters[j], window, with_series)
            M[i][j] = c
            M[j][i] = -c
    return M, zero


def wick_vev(word: FermionWord, state: State = None, window: int = 8, method: str = "auto"):
    """Normalized ``<0| word |V> / <0|V>``.

    Returns an :class:`HScalar`, or a :class:`BiSeries` in (u, v) when the word
    contains field markers (the singular kernel is expanded for ``|u| > |v|``
    down to u-exponent ``-window - 1``).  ``method`` selects ``pfaffian`` or
    ``determinant`` (charged words only); ``auto`` uses the determinant for
    charged words.
    """
    is_neutral = _check_word(word, state)
    if is_neutral is None:
        return HScalar.const(1)
    if is_neutral and len(word) % 2:
        return _zero_bs() if any(lab.is_field for lab in word) else ZERO
    M, zero = contraction_matrix(word, state, window)
    if is_neutral or method == "pfaffian":
        out = pfaffian(M, zero)
    else:
        out = _charged_determinant(word, M, zero)
    return out


def _charged_determinant(word, M, zero):
    stars = [i for i, lab in enumerate(word) if lab.kind == PSI_STAR]
    plains = [i for i, lab in enumerate(word) if lab.kind == PSI]
    n = len(stars)
    B = [[M[s][p] for p in plains] for s in stars]
    perm = stars + plains
    sign = _perm_sign([perm.index(i) for i in range(len(perm))]) * (-1) ** (n * (n - 1) // 2)
    d = determinant(B, zero)
    return d if sign > 0 else -d


# ---------------------------------------------------------------------------
# literal Fock-space oracle

def fock_oracle_vev(word: FermionWord, state: State = None, max_modes: int = 6, max_len: int = 8) -> HScalar:
    """``<0| word e^A |0>`` evaluated on explicit occupation states (no Wick theorem)."""
    if isinstance(state, str):
        state = None
    if any(lab.is_field for lab in word):
        raise ValueError("the oracle works with modes only")
    if len(word) > max_len:
        raise SupportTooLarge(f"word length {len(word)} > {max_len}")
    modes = state.modes() if state is not None else set()
    if len(modes) > max_modes:
        raise SupportTooLarge(f"state supported on {len(modes)} modes > {max_modes}")
    if not word:
        return HScalar.const(1)
    neutral = {lab.neutral for lab in word}
    if len(neutral) > 1:
        raise MixedStatistics("word mixes charged and neutral fermions")
    if neutral.pop():
        act, vac, is_vac = _neutral_act, (frozenset(), False), lambda s: s == (frozenset(), False)
    else:
        act, vac, is_vac = _charged_act, frozenset(), lambda s: s == frozenset()
    vec = {vac: ONE}
    if state is not None:
        vec = _exp_apply(state.quadratic(), vec, act)
    for lab in reversed(word):
        vec = _apply_mode(lab, vec, act)
    return sum((c for s, c in vec.items() if is_vac(s)), ZERO)


def _apply_mode(lab: Label, vec: dict, act) -> dict:
    out: dict = {}
    for s, c in vec.items():
        res = act(lab, s)
        if res is None:
            continue
        sign, s2 = res
        out[s2] = out.get(s2, ZERO) + c.scale(sign)
    return {s: c for s, c in out.items() if not c.is_zero()}


def _exp_apply(quad, vec: dict, act) -> dict:
    total = dict(vec)
    term = dict(vec)
    k = 0
    while term:
        k += 1
        nxt: dict = {}
        for c, x, y in quad:
            part = _apply_mode(x, _apply_mode(y, term, act), act)
            for s, v in part.items():
                nxt[s] = nxt.get(s, ZERO) + c * v
        term = {s: v.scale(Fraction(1, k)) for s, v in nxt.items() if not v.is_zero()}
        for s, v in term.items():
            total[s] = total.get(s, ZERO) + v
        if k > 64:
            raise RuntimeError("e^A did not terminate")
    return {s: c for s, c in total.items() if not c.is_zero()}


def _charged_act(lab: Label, s: frozenset):
    """Charged modes; ``s`` is the symmetric difference against the vacuum (particles and holes)."""
    k = lab.index
    occupied = (k in s) if k > 0 else (k not in s)
    # sign = (-1)^{#occupied modes above k}: particles above k plus filled negatives above k
    above = sum(1 for m in s if m > k and m > 0) + sum(1 for m in _neg_between(k) if m not in s)
    sign = -1 if above % 2 else 1
    if lab.kind == PSI:
        if occupied:
            return None
    else:
        if not occupied:
            return None
    return sign, s ^ {k}


def _neg_between(k):
    """Negative modes strictly above k (finitely many)."""
    out = []
    m = -HALF
    while m > k:
        out.append(m)
        m -= 1
    return out


def _neutral_act(lab: Label, s):
    pos, zero_bit = s
    n = lab.index
    if n > 0:
        if n in pos:
            return None
        greater = sum(1 for m in pos if m > n)
        return (-1) ** greater, (pos | {n}, zero_bit)
    if n < 0:
        if -n not in pos:
            return None
        before = sum(1 for m in pos if m > -n)
        return (-1) ** before * (-1) ** (-n), (pos - {-n}, zero_bit)
    sign = (-1) ** len(pos)
    if zero_bit:
        return Fraction(sign, 2), (pos, False)
    return sign, (pos, True)


# ---------------------------------------------------------------------------
# canonical basis and affine coordinates

def canonical_from_admissible(basis: Sequence[ZSeries]):
    """Gauss elimination ``phi_k -> z^(k+1/2) + sum_i b[k,i] z^(-i-1/2)``.

    Vectors are half-parity ZSeries (key ``n`` is ``z^(n+1/2)``).  Returns the
    canonical vectors and a :class:`BogoliubovKP` holding every coefficient
    inside the common window.
    """
    canon: list[ZSeries] = []
    for k, vec in enumerate(basis):
        if not vec.half:
            raise NotAdmissible(f"basis vector {k} is not half-integer")
        if vec.hi != k or vec.coeff(k).first_difference(ONE) is not None:
            raise NotAdmissible(f"basis vector {k} must lead with z^({k}+1/2) and coefficient 1")
        cur = vec
        for j in range(k - 1, -1, -1):
            c = cur.coeff(j)
            if not c.is_zero():
                cur = cur - canon[j].scale(c)
        canon.append(cur)
    b = {}
    for k, vec in enumerate(canon):
        for e, c in vec.items():
            if e < 0:
                b[(k, -e - 1)] = c
    return canon, BogoliubovKP(b)


def affine_extract(Psi: ZSeries, Psi_star: ZSeries):
    """Row ``b[0, i]`` from the wave function and column ``b[i, 0]`` from its dual."""
    for name, s in (("wave function", Psi), ("dual wave function", Psi_star)):
        if s.half or s.hi > 0 or s.coeff(0).first_difference(ONE) is not None:
            raise BadNormalization(f"{name} must be 1 + O(z^-1)")
    row = {i: Psi.coeff(-i - 1) for i in range(0, -int(Psi.lo))} if Psi.lo != NEG_INF else \
        {-e - 1: c for e, c in Psi.items() if e < 0}
    col = {i: -Psi_star.coeff(-i - 1) for i in range(0, -int(Psi_star.lo))} if Psi_star.lo != NEG_INF else \
        {-e - 1: -c for e, c in Psi_star.items() if e < 0}
    if 0 in row and 0 in col and not row[0].agrees(col[0]):
        raise InconsistentData("b[0,0] differs between the wave function and its dual")
    return row, col


def affine_extract_b(PsiB: ZSeries, tPsiB: ZSeries) -> dict:
    """Rows 0 and 1 of the B-type coordinates (with their anti-symmetric mirrors)."""
    if PsiB.half or PsiB.hi > 0 or PsiB.coeff(0).first_difference(HScalar.const(HALF)) is not None:
        raise BadNormalization("first one-point function must be 1/2 + O(z^-1)")
    if tPsiB.half or tPsiB.hi != 1 or tPsiB.coeff(1).first_difference(HScalar.const(-1)) is not None:
        raise BadNormalization("second one-point function must be -z + O(1)")
    a: dict = {}

    def put(n, m, c):
        a[(n, m)] = c
        a[(m, n)] = -c

    for e, c in PsiB.items():
        if e < 0:
            put(0, -e, c.scale((-1) ** (-e)))
    a10 = -tPsiB.coeff(0)
    if (0, 1) in a and not (a[(1, 0)] - a10).is_zero():
        raise InconsistentData("a[1,0] from the second function disagrees with -a[0,1] from the first")
    put(1, 0, a10)
    for e, c in tPsiB.items():
        if e < 0 and -e != 1:
            put(1, -e, c.scale(Fraction((-1) ** (-e + 1), 2)))
    if tPsiB.lo <= -1:
        c = tPsiB.coeff(-1)
        # a_{1,1} = 0 forces the z^-1 coefficient of the second function to vanish
        if not c.is_zero():
            raise InconsistentData("second one-point function has a nonzero z^-1 term")
    a = {k: v for k, v in a.items() if not v.is_zero()}
    return a


def bkp_window_of(PsiB: ZSeries) -> int:
    return -int(PsiB.lo) if PsiB.lo != NEG_INF else max((-e for e in PsiB.keys()), default=0)


def two_point_assemble(coords: Union[BogoliubovKP, BogoliubovBKP], order: int) -> BiSeries:
    """KP: ``1/(u-v) + sum b[i,j] u^(-i-1) v^(-j-1)`` for ``i + j <= order``.

    BKP: ``(u-v)/(2(u+v)) + sum C[n,m] u^-n v^-m`` for ``n + m <= order`` with
    ``C[n,0] = (-1)^n a[n,0]``, ``C[0,m] = (-1)^m a[0,m]``,
    ``C[n,m] = 2 (-1)^(n+m) a[n,m]``.
    """
    N = order
    if isinstance(coords, BogoliubovKP):
        terms = {(-i - 1, -j - 1): c for (i, j), c in coords.b.items() if i + j <= N}
        body = BiSeries(terms, -N - 1, -N - 2, -1, -2)
        return body + kernel_expand("KP", -N - 1)
    terms = {}
    for (n, m), c in coords.a.items():
        if n + m > N:
            continue
        if n == 0 or m == 0:
            terms[(-n, -m)] = c.scale((-1) ** ((n + m) % 2))
        else:
            terms[(-n, -m)] = c.scale(2 * (-1) ** ((n + m) % 2))
    body = BiSeries(terms, -N, -N, 0, 0)
    return body + kernel_expand("BKP", -N)


def two_point_disassemble(psi_uv: BiSeries, hierarchy: str, order: int):
    """Inverse of :func:`two_point_assemble` on the triangle ``i + j <= order``."""
    if hierarchy.upper() == "KP":
        rest = psi_uv - kernel_expand("KP", -order - 1)
        b = {}
        for i in range(order + 1):
            for j in range(order + 1 - i):
                c = rest.coeff(-i - 1, -j - 1)
                if not c.is_zero():
                    b[(i, j)] = c
        return BogoliubovKP(b)
    rest = psi_uv - kernel_expand("BKP", -order)
    a = {}
    for n in range(order + 1):
        for m in range(order + 1 - n):
            if n == m == 0:
                continue
            c = rest.coeff(-n, -m)
            if c.is_zero():
                continue
            if n == 0 or m == 0:
                a[(n, m)] = c.scale((-1) ** ((n + m) % 2))
            else:
                a[(n, m)] = c.scale(Fraction((-1) ** ((n + m) % 2), 2))
    return BogoliubovBKP(a)
