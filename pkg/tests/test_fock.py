import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from taulift import (BogoliubovBKP, BogoliubovKP, HScalar, ZSeries, affine_extract, affine_extract_b,
                     bs_separable_product, canonical_from_admissible, fock_oracle_vev, kernel_expand,
                     model_instantiate, two_point_assemble, two_point_disassemble, wick_vev)
from taulift.errors import (AntisymmetryViolated, BadNormalization, MixedStatistics, NotAdmissible,
                            SupportTooLarge, UnbalancedCharge)
from taulift.fock import phi, psi, psi_field, psi_star, psi_star_field
from taulift.scalar import ZERO

h = Fraction(1, 2)
q = st.fractions(min_value=-6, max_value=6, max_denominator=5)


class TestVacuumPairings:
    def test_examples(self):
        assert wick_vev([psi_star(h), psi(h)]) == HScalar.const(1)
        assert wick_vev([psi(-h), psi_star(-h)]) == HScalar.const(1)
        assert wick_vev([psi(h), psi_star(h)]) == ZERO
        assert wick_vev([phi(0), phi(0)]) == HScalar.const(h)

    def test_neutral_sign(self):
        # {phi_i, phi_j} = (-1)^i delta_{i+j,0} with phi_-n |0> = 0
        for n in range(1, 6):
            assert wick_vev([phi(-n), phi(n)]) == HScalar.const((-1) ** n)
            assert wick_vev([phi(n), phi(-n)]) == ZERO

    def test_all_length_two_words_match_oracle(self):
        modes = [Fraction(2 * k + 1, 2) for k in range(-4, 4)]
        for a, b in itertools.product(modes, repeat=2):
            for w in ([psi_star(a), psi(b)], [psi(a), psi_star(b)]):
                assert wick_vev(w) == fock_oracle_vev(w)
        for i, j in itertools.product(range(-4, 5), repeat=2):
            assert wick_vev([phi(i), phi(j)]) == fock_oracle_vev([phi(i), phi(j)])

    def test_four_fermions(self):
        w = [psi_star(h), psi_star(3 * h), psi(3 * h), psi(h)]
        assert wick_vev(w) == HScalar.const(1) == fock_oracle_vev(w)


class TestBogoliubov:
    @given(q)
    def test_single_entry(self, b):
        st_ = BogoliubovKP({(0, 0): b})
        assert wick_vev([psi_star(h), psi(-h)], st_) == HScalar.const(b)
        assert fock_oracle_vev([psi_star(h), psi(-h)], st_) == HScalar.const(b)

    @given(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), q, max_size=3))
    def test_pair_function_returns_b(self, b):
        state = BogoliubovKP(b)
        for k, i in itertools.product(range(3), repeat=2):
            got = wick_vev([psi_star(k + h), psi(-i - h)], state)
            assert got == HScalar.const(b.get((k, i), 0))

    @given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda t: t[0] < t[1]),
                           q, max_size=3),
           st.lists(st.integers(-3, 3), min_size=4, max_size=4))
    def test_neutral_four_letters(self, upper, idx):
        state = BogoliubovBKP.from_upper(upper)
        word = [phi(i) for i in idx]
        assert wick_vev(word, state) == fock_oracle_vev(word, state)

    def test_determinant_equals_pfaffian(self):
        state = BogoliubovKP({(0, 0): 2, (1, 0): -1, (0, 1): 3})
        w = [psi_star(h), psi(-h), psi_star(3 * h), psi(-3 * h)]
        assert wick_vev(w, state, method="determinant") == wick_vev(w, state, method="pfaffian")
        assert wick_vev(w, state) == fock_oracle_vev(w, state)

    def test_fields_give_two_point_function(self):
        b = {(0, 0): 2, (0, 1): 3, (1, 0): 5, (1, 2): -1}
        state = BogoliubovKP(b)
        word = [psi_star(h), psi(-h), psi_star_field("u"), psi_field("v")]
        got = wick_vev(word, state, window=4)
        Psi = ZSeries({0: 1, -1: 2, -2: 3}, lo=-5)
        Psi_star = ZSeries({0: 1, -1: -2, -2: -5}, lo=-5)
        expect = two_point_assemble(state, 4).scale(2) + bs_separable_product(Psi_star, Psi)
        assert got.first_difference(expect) is None

    def test_antisymmetry_enforced(self):
        with pytest.raises(AntisymmetryViolated):
            BogoliubovBKP({(0, 1): 1})
        with pytest.raises(AntisymmetryViolated):
            BogoliubovBKP({(2, 2): 1})
        assert BogoliubovBKP.from_upper({(0, 1): 3}).entry(1, 0) == HScalar.const(-3)


class TestErrors:
    def test_mixed(self):
        with pytest.raises(MixedStatistics):
            wick_vev([psi(h), phi(1)])
        with pytest.raises(MixedStatistics):
            wick_vev([phi(0), phi(0)], BogoliubovKP({(0, 0): 1}))

    def test_unbalanced(self):
        with pytest.raises(UnbalancedCharge):
            wick_vev([psi(h), psi(-h)])

    def test_odd_neutral_is_zero(self):
        assert wick_vev([phi(0), phi(1), phi(-1)]) == ZERO

    def test_oracle_support(self):
        big = BogoliubovKP({(k, k): 1 for k in range(4)})
        with pytest.raises(SupportTooLarge):
            fock_oracle_vev([psi_star(h), psi(-h)], big)
        with pytest.raises(SupportTooLarge):
            fock_oracle_vev([phi(0)] * 10)

    def test_half_integer_modes(self):
        with pytest.raises(ValueError):
            psi(1)


def half_series(terms, lo):
    return ZSeries(terms, lo=lo, half=True)


class TestCanonicalBasis:
    def test_vacuum(self):
        canon, b = canonical_from_admissible([half_series({0: 1}, -3), half_series({1: 1}, -3)])
        assert b.b == {}

    def test_one_step(self):
        basis = [half_series({0: 1, -1: 1}, -3), half_series({1: 1, 0: 1}, -3)]
        canon, b = canonical_from_admissible(basis)
        assert dict(canon[1].items()) == {1: HScalar.const(1), -1: HScalar.const(-1)}
        assert b.b == {(0, 0): HScalar.const(1), (1, 0): HScalar.const(-1)}

    def test_not_admissible(self):
        with pytest.raises(NotAdmissible):
            canonical_from_admissible([half_series({0: 2}, -3)])
        with pytest.raises(NotAdmissible):
            canonical_from_admissible([ZSeries({0: 1}, lo=-3)])
        with pytest.raises(NotAdmissible):
            canonical_from_admissible([half_series({1: 1}, -3)])

    def test_idempotent(self):
        basis = [half_series({0: 1, -1: 2, -2: 3}, -4), half_series({1: 1, 0: 5, -1: 1}, -4)]
        canon, b = canonical_from_admissible(basis)
        again, b2 = canonical_from_admissible(canon)
        assert b.b == b2.b


class TestAffineExtract:
    def test_vacuum_row(self):
        row, col = affine_extract(ZSeries({0: 1}, lo=-4), ZSeries({0: 1}, lo=-4))
        assert all(c.is_zero() for c in row.values()) and all(c.is_zero() for c in col.values())

    def test_simple_hurwitz(self):
        Psi, Psi_star = model_instantiate("simple_hurwitz").one_point(4)
        row, col = affine_extract(Psi, Psi_star)
        assert row[0].agrees(HScalar({-1: 1}))
        assert col[0].agrees(HScalar({-1: 1}))

    def test_bgw_row(self):
        first, second = model_instantiate("bgw").one_point(4)
        a = affine_extract_b(first, second)
        assert a[(0, 1)].agrees(HScalar({1: Fraction(1, 16)}))
        assert a[(1, 0)].agrees(-a[(0, 1)])

    def test_bad_normalization(self):
        with pytest.raises(BadNormalization):
            affine_extract(ZSeries({0: 2}, lo=-3), ZSeries({0: 1}, lo=-3))
        with pytest.raises(BadNormalization):
            affine_extract_b(ZSeries({0: 1}, lo=-3), ZSeries({1: -1}, lo=-3))
        with pytest.raises(BadNormalization):
            affine_extract_b(ZSeries({0: h}, lo=-3), ZSeries({1: 1}, lo=-3))


class TestAssemble:
    def test_zero_coordinates(self):
        assert two_point_assemble(BogoliubovKP({}), 5).first_difference(kernel_expand("KP", -6)) is None
        assert two_point_assemble(BogoliubovBKP({}), 5).first_difference(kernel_expand("BKP", -5)) is None

    def test_spin_entry_factor(self):
        m = model_instantiate("spin_hurwitz", {"r": 1})
        a12 = m.known_affine(1, 2)
        assert a12.leading() == (-3, Fraction(1, 24))
        uv = two_point_assemble(m.solve(4).coords, 4)
        assert uv.coeff(-1, -2).first_difference(a12.scale(-2)) is None

    @given(st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), q, max_size=6))
    def test_kp_round_trip(self, b):
        coords = BogoliubovKP({k: c for k, c in b.items() if sum(k) <= 4})
        back = two_point_disassemble(two_point_assemble(coords, 4), "KP", 4)
        assert back.b == coords.b

    @given(st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda t: t[0] < t[1]),
                           q, max_size=6))
    def test_bkp_round_trip(self, upper):
        coords = BogoliubovBKP.from_upper({k: c for k, c in upper.items() if sum(k) <= 4})
        back = two_point_disassemble(two_point_assemble(coords, 4), "BKP", 4)
        assert back.a == coords.a
