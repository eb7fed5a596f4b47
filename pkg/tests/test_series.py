import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from taulift import model_instantiate
from taulift.errors import ParityMismatch, WindowExhausted
from taulift.scalar import HScalar
from taulift.series import (BiSeries, ZSeries, bs_inverse_dominant_u, bs_separable_product,
                            kernel_expand, zs_arith)

fracs = st.fractions(min_value=-9, max_value=9, max_denominator=6)
hscalars = st.dictionaries(st.integers(-2, 3), fracs, max_size=3).map(HScalar)


def same(a: ZSeries, b: ZSeries) -> bool:
    return a.lo == b.lo and a.half == b.half and a.first_difference(b) is None


def zseries(lo=-6, half=False):
    return st.dictionaries(st.integers(lo, 2), hscalars, max_size=6).map(
        lambda d: ZSeries(d, lo=lo, half=half))


def biseries(lo=-5):
    keys = st.tuples(st.integers(lo, 1), st.integers(lo, 1))
    return st.dictionaries(keys, hscalars, max_size=8).map(
        lambda d: BiSeries({k: c for k, c in d.items() if k[0] + k[1] >= lo}, lo, lo, 1, 2))


class TestZSeries:
    def test_product_example(self):
        a = ZSeries({0: 1, -1: 1})
        b = ZSeries({0: 1, -1: -1})
        assert same(a * b, ZSeries({0: 1, -2: -1}))

    def test_half_parity_product(self):
        x = ZSeries.monomial(0, half=True) * ZSeries({0: 1, -1: 1})
        assert x.half and dict(x.items()) == {0: HScalar.const(1), -1: HScalar.const(1)}

    def test_parity_mismatch(self):
        with pytest.raises(ParityMismatch):
            ZSeries.monomial(0, half=True) + ZSeries.one()

    def test_unit_inverse(self):
        Psi = ZSeries({0: 1, -1: HScalar({-1: 2}), -3: 5}, lo=-8)
        prod = Psi * Psi.inv()
        assert prod.lo == -8
        assert dict(prod.items()) == {0: HScalar.const(1)}

    def test_window_is_enforced(self):
        with pytest.raises(WindowExhausted):
            ZSeries({0: 1}, lo=-3).coeff(-4)

    @given(zseries(), zseries())
    def test_product_commutes(self, a, b):
        assert same(zs_arith(a, b, "mul"), zs_arith(b, a, "mul"))

    @given(zseries())
    def test_json_round_trip(self, a):
        assert same(ZSeries.from_json(json.loads(json.dumps(a.to_json()))), a)


class TestKernels:
    def test_coefficients(self):
        assert kernel_expand("KP", -5).coeff(-1, 0) == HScalar.const(1)
        bk = kernel_expand("BKP", -5)
        assert bk.coeff(0, 0) == HScalar.const(Fraction(1, 2))
        assert bk.coeff(-1, 1) == HScalar.const(-1)
        assert bk.coeff(-2, 2) == HScalar.const(1)

    @pytest.mark.parametrize("lo", [-3, -8])
    def test_kp_identity(self, lo):
        K = kernel_expand("KP", lo)
        prod = BiSeries({(1, 0): 1, (0, 1): -1}) * K
        assert {k: c for k, c in prod.items() if not c.is_zero()} == {(0, 0): HScalar.const(1)}
        assert prod.a_lo == lo + 1

    @pytest.mark.parametrize("lo", [-3, -8])
    def test_bkp_identity(self, lo):
        K = kernel_expand("BKP", lo)
        prod = BiSeries({(1, 0): 1, (0, 1): 1}) * K
        half = Fraction(1, 2)
        assert {k: c for k, c in prod.items() if not c.is_zero()} == {(1, 0): HScalar.const(half),
                                                                          (0, 1): HScalar.const(-half)}

    def test_bigger_window_agrees(self):
        small, big = kernel_expand("BKP", -4), kernel_expand("BKP", -9)
        assert all(big.coeff(*k) == c for k, c in small.items())

    def test_inverse_dominant_u_matches_kernel(self):
        inv = bs_inverse_dominant_u(BiSeries({(1, 0): 1, (0, 1): -1}), -6)
        assert inv.first_difference(kernel_expand("KP", -6)) is None


class TestBiSeries:
    def test_separable_example(self):
        fu = ZSeries({0: 1, -1: 1})
        gv = ZSeries({0: 1, -1: -1})
        x = bs_separable_product(fu, gv)
        assert {k: c.coeff(0) for k, c in x.items()} == {(0, 0): 1, (0, -1): -1, (-1, 0): 1, (-1, -1): -1}

    def test_simple_hurwitz_product(self):
        Psi, Psi_star = model_instantiate("simple_hurwitz").one_point(3)
        x = bs_separable_product(Psi_star, Psi)
        assert x.coeff(-1, -1).leading() == (-2, -1)

    def test_outside_window_is_unknown(self):
        x = BiSeries({(0, 0): 1}, -2, -3)
        with pytest.raises(WindowExhausted):
            x.coeff(-3, 0)

    @given(biseries())
    def test_json_round_trip(self, x):
        assert BiSeries.from_json(json.loads(json.dumps(x.to_json()))).first_difference(x) is None

    @given(biseries(), biseries())
    def test_addition_commutes(self, x, y):
        assert (x + y).first_difference(y + x) is None
