from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from taulift import canonical_from_admissible, model_instantiate
from taulift.errors import InvalidExponential
from taulift.scalar import HScalar, hs_exp
from taulift.series import ZSeries
from taulift.weylop import (OpSymbol, is_lifting_candidate, lifting_operator, op_add, op_adjoint,
                            op_agrees, op_antisym, op_apply, op_compose, op_euler_poly, op_from_generator,
                            op_half_conjugate, op_identity, op_iota, op_monomial, op_pow, op_scale, op_z)

NS = [Fraction(k) for k in range(-7, 8)]
HALF_NS = [Fraction(2 * k + 1, 2) for k in range(-6, 6)]

coef = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool)
monomials = st.tuples(coef, st.integers(-3, 3), st.integers(0, 3))
euler_terms = st.tuples(coef, st.integers(-3, 3), st.integers(0, 3))


def build(terms, make):
    A = None
    for c, k, l in terms:
        t = op_scale(make(k, l), c)
        A = t if A is None else op_add(A, t)
    return A


def z_euler(k, m):
    """z^k (z d)^m"""
    cs = [0] * m + [1]
    return op_euler_poly(cs, k)


ops = st.lists(monomials, min_size=1, max_size=3).map(lambda t: build(t, op_monomial))


def eig(A, s, n):
    return A.eigen(s, n)


class TestConstruction:
    def test_euler(self):
        A = op_from_generator("euler_poly", coeffs=[0, 1])
        assert A.shifts == [0] and all(eig(A, 0, n) == HScalar.const(n) for n in NS)

    def test_simple_hurwitz(self):
        l = lifting_operator("simple_hurwitz", 6)
        for n in NS:
            assert eig(l, 1, n).agrees(hs_exp(HScalar({1: n + 1}), 6), 6)

    def test_r_spin(self):
        r = 3
        l = lifting_operator("r_spin", r=r)
        assert sorted(l.shifts) == [-r, 1]
        assert eig(l, 1, 2) == HScalar.const(1)
        assert eig(l, -r, 2) == HScalar({1: -(2 + Fraction(1 - r, 2))})

    def test_exp_needs_positive_valuation(self):
        with pytest.raises(InvalidExponential):
            op_from_generator("exp_euler", c=HScalar.const(1))

    def test_monomial_falling_factorial(self):
        A = op_monomial(2, 3)
        assert A.shifts == [-1]
        assert eig(A, -1, 5) == HScalar.const(60)

    @pytest.mark.parametrize("model,params", [("simple_hurwitz", {}), ("monotone_hurwitz", {}),
                                              ("dessins", {}), ("r_spin", {"r": 2}), ("bgw", {}),
                                              ("spin_hurwitz", {"r": 2})])
    def test_registered_liftings_are_candidates(self, model, params):
        assert is_lifting_candidate(lifting_operator(model, 8, **params), NS)


class TestApply:
    def test_euler_on_series(self):
        x = ZSeries({2: 1, -1: 3})
        y = op_apply(op_euler_poly([0, 1]), x)
        assert dict(y.items()) == {2: HScalar.const(2), -1: HScalar.const(-3)}

    def test_identity(self):
        x = ZSeries({0: 1, -2: HScalar({-1: 4})}, lo=-5)
        y = op_apply(op_identity(), x)
        assert y.lo == x.lo and y.first_difference(x) is None

    def test_simple_hurwitz_on_one(self):
        y = op_apply(lifting_operator("simple_hurwitz", 5), ZSeries.one())
        assert list(y.keys()) == [1]
        assert y.coeff(1).agrees(hs_exp(HScalar.hbar(), 5), 5)

    def test_shift_consumes_window(self):
        y = op_apply(op_z(-2), ZSeries({0: 1}, lo=-4))
        assert y.lo == -6


class TestCompose:
    def test_euler_after_z(self):
        A = op_compose(op_euler_poly([0, 1]), op_z(1))
        assert A.shifts == [1] and all(eig(A, 1, n) == HScalar.const(n + 1) for n in NS)

    def test_unit(self):
        A = lifting_operator("dessins")
        assert op_agrees(op_compose(A, op_identity()), A, NS)
        assert op_agrees(op_compose(op_identity(), A), A, NS)

    def test_bgw_square(self):
        l = lifting_operator("bgw")
        sq = op_pow(l, 2)
        # (z - (h/2) z d)^2 = z^2 - (h/2)(z zd + zd z) + (h^2/4)(zd)^2
        for n in NS:
            assert eig(sq, 2, n) == HScalar.const(1)
            assert eig(sq, 1, n) == HScalar({1: -(2 * n + 1) / Fraction(2)})
            assert eig(sq, 0, n) == HScalar({2: n * n / 4})
        x = ZSeries({0: 1, -1: 2, -3: HScalar({1: 5})})
        assert op_apply(sq, x).first_difference(op_apply(l, op_apply(l, x))) is None


class TestAdjoint:
    def test_examples(self):
        A = op_adjoint(op_euler_poly([0, 1]))
        assert all(eig(A, 0, n) == HScalar.const(-n - 1) for n in NS)
        assert op_agrees(op_adjoint(op_z(1)), op_z(1), NS)
        ls = op_adjoint(lifting_operator("simple_hurwitz", 6))
        for n in NS:
            assert eig(ls, 1, n).agrees(hs_exp(HScalar({1: -(n + 1)}), 6), 6)

    def test_monotone(self):
        ls = op_adjoint(lifting_operator("monotone_hurwitz"))
        assert all(eig(ls, 1, n) == HScalar({0: 1, 1: -(n + 1)}) for n in NS)

    @given(ops, ops)
    def test_anti_automorphism(self, A, B):
        assert op_agrees(op_adjoint(op_compose(A, B)), op_compose(op_adjoint(B), op_adjoint(A)), NS)
        assert op_agrees(op_adjoint(op_adjoint(A)), A, NS)

    @given(st.lists(monomials, min_size=1, max_size=3))
    def test_generator_rule(self, terms):
        A = build(terms, op_monomial)
        minus_d = op_scale(op_monomial(0, 1), -1)
        B = build(terms, lambda k, l: op_compose(op_pow(minus_d, l), op_z(k)))
        assert op_agrees(op_adjoint(A), B, NS)

    def test_integration_by_parts(self):
        # residue pairing: res z^a (A z^b) = res (A* z^a) z^b
        A = op_add(op_monomial(2, 1), op_scale(op_monomial(-1, 2), 3))
        As = op_adjoint(A)
        for a in range(-4, 4):
            for b in range(-4, 4):
                lhs = sum((eig(A, s, b) for s in A.shifts if a + b + s == -1), HScalar.zero())
                rhs = sum((eig(As, s, a) for s in As.shifts if a + b + s == -1), HScalar.zero())
                assert lhs == rhs


class TestIota:
    def test_examples(self):
        E = op_euler_poly([0, 1])
        assert op_agrees(op_iota(E), op_scale(E, -1), NS)

    @given(st.lists(euler_terms, min_size=1, max_size=3))
    def test_generator_rule(self, terms):
        # iota(z^k (z d)^m) = (-z d)^m (-z)^k
        A = build(terms, z_euler)
        minus_zd = op_euler_poly([0, -1])
        B = build(terms, lambda k, m: op_compose(op_pow(minus_zd, m), op_z(k, (-1) ** (k % 2))))
        assert op_agrees(op_iota(A), B, NS)

    @given(ops, ops)
    def test_involution_reverses_products(self, A, B):
        assert op_agrees(op_iota(op_iota(A)), A, NS)
        assert op_agrees(op_iota(op_compose(A, B)), op_compose(op_iota(B), op_iota(A)), NS)

    @pytest.mark.parametrize("n", range(-6, 7))
    def test_b_generators(self, n):
        g = op_from_generator("HB" if n % 2 else "LB", n=n)
        assert op_agrees(op_iota(g), op_scale(g, -1), NS)

    def test_bgw_lifting_is_b_type(self):
        l = lifting_operator("bgw")
        assert op_agrees(op_antisym(l), l, NS)

    def test_spin_lifting_is_b_type(self):
        for r in (1, 2, 3):
            l = lifting_operator("spin_hurwitz", 8, r=r)
            assert op_agrees(op_antisym(l), l, NS)

    def test_spin_even_r_matches_polynomial_form(self):
        r = 2
        l = lifting_operator("spin_hurwitz", 8, r=r)
        for n in NS:
            poly = HScalar({r: Fraction((-1) ** r - (n + 1) ** (r + 1) + n ** (r + 1), r + 1)}, 8)
            assert eig(l, 1, n).agrees(hs_exp(poly), 8)


class TestHalfConjugate:
    def test_examples(self):
        E = op_half_conjugate(op_euler_poly([0, 1]))
        assert all(eig(E, 0, n) == HScalar.const(n - Fraction(1, 2)) for n in HALF_NS)
        assert op_agrees(op_half_conjugate(op_z(1)), op_z(1), HALF_NS)
        twice = op_half_conjugate(op_half_conjugate(op_euler_poly([0, 1])))
        assert all(eig(twice, 0, n) == HScalar.const(n - 1) for n in NS)


@pytest.mark.parametrize("model,params", [("simple_hurwitz", {}), ("dessins", {}),
                                          ("monotone_hurwitz", {}), ("framed_vertex", {"f": 1})])
def test_kac_schwarz_basis_gives_solver_coordinates(model, params):
    """phi_k = l^k z^(1/2) Psi, made monic and eliminated, carries the recursion's b."""
    H, K, depth = 8, 4, 9
    m = model_instantiate(model, params, h_trunc=H)
    Psi, _ = m.one_point(depth)
    l = op_half_conjugate(m.lifting)
    phi = ZSeries(dict(Psi.items()), Psi.lo, half=True)
    basis = []
    for k in range(K):
        lead = phi.coeff(k)
        basis.append(phi.scale(lead.inv(H + 2 * depth)))
        phi = op_apply(l, phi)
    _, coords = canonical_from_admissible(basis)
    solved = m.solve(K + depth).coords
    for k in range(K):
        # every application of l costs one order of the window
        for i in range(depth - K):
            assert coords.entry(k, i).first_difference(solved.entry(k, i)) is None, (k, i)
