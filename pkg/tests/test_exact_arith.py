"""Exact roots, certified fractional powers and PS membership."""
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from psgoldbach.exact_arith import (
    MAX_BITS, AmbiguousFloor, CertifiedFrac, RationalExponent, ceil_pow, ceil_pow_array,
    floor_pow, floor_pow_array, frac_pow, iroot, is_exact_pow, is_ps_member, pow_diff_array,
    ps_member_mask, ps_member_mask_range, psi,
)

mpmath.mp.dps = 60

# exponents in (1/2, 1] with small denominators
exponents = st.integers(2, 60).flatmap(
    lambda d: st.integers(d // 2 + 1, d).map(lambda n: Fraction(n, d))
).map(lambda f: RationalExponent(f.numerator, f.denominator))


def forward_set(limit, g: RationalExponent):
    """{floor(n^(1/g)) <= limit} by exact integer roots (gmpy2)."""
    out, n = set(), 1
    while True:
        m = int(gmpy2.iroot(gmpy2.mpz(n) ** g.den, g.num)[0])
        if m > limit:
            return out
        out.add(m)
        n += 1


class TestRationalExponent:
    def test_parse_and_str(self):
        g = RationalExponent.parse("18/20")
        assert (g.num, g.den) == (9, 10)
        assert str(g) == "9/10"
        assert str(RationalExponent.parse("1")) == "1"
        assert RationalExponent.parse(1).is_one

    @pytest.mark.parametrize("bad", ["1/2", "2/5", "11/10", "0", "-3/4"])
    def test_out_of_range(self, bad):
        with pytest.raises(ValueError):
            RationalExponent.parse(bad)

    def test_float_rejected(self):
        with pytest.raises(TypeError):
            RationalExponent.parse(0.9)

    def test_unreduced_direct_construction(self):
        with pytest.raises(ValueError):
            RationalExponent(18, 20)


class TestIroot:
    @given(st.integers(0, 10 ** 60), st.integers(1, 12))
    def test_matches_gmpy2(self, x, k):
        assert iroot(x, k) == int(gmpy2.iroot(x, k)[0])

    @given(st.integers(1, 10 ** 30), st.integers(2, 9))
    def test_perfect_powers(self, r, k):
        assert iroot(r ** k, k) == r
        assert iroot(r ** k - 1, k) == r - 1

    def test_negative(self):
        with pytest.raises(ValueError):
            iroot(-1, 3)


class TestFloorCeilPow:
    @given(st.integers(1, 10 ** 15), exponents)
    def test_floor_against_mpmath(self, n, g):
        v = mpmath.mpf(n) ** (mpmath.mpf(g.num) / g.den)
        assert floor_pow(n, g) == int(mpmath.floor(v))
        assert ceil_pow(n, g) == int(mpmath.ceil(v))

    def test_known(self):
        g = RationalExponent.parse("2/3")
        assert floor_pow(8, g) == 4 and ceil_pow(8, g) == 4
        assert floor_pow(2, g) == 1 and ceil_pow(2, g) == 2
        assert is_exact_pow(27, g) and not is_exact_pow(26, g)

    @given(st.lists(st.integers(1, 2 ** 40), min_size=1, max_size=50), exponents)
    def test_array_matches_scalar(self, ns, g):
        assert floor_pow_array(ns, g).tolist() == [floor_pow(n, g) for n in ns]
        assert ceil_pow_array(ns, g).tolist() == [ceil_pow(n, g) for n in ns]

    def test_array_on_exact_powers(self):
        # n = r^3 makes n^(2/3) an integer, the hardest case for a float path
        g = RationalExponent.parse("2/3")
        rs = np.arange(2, 20000, dtype=np.int64)
        ns = rs ** 3
        assert np.array_equal(floor_pow_array(ns, g), rs ** 2)
        assert np.array_equal(ceil_pow_array(ns, g), rs ** 2)
        assert np.array_equal(floor_pow_array(ns - 1, g), rs ** 2 - 1)


class TestCertifiedFrac:
    @given(st.integers(2, 10 ** 12), exponents, st.sampled_from([96, 128, 256]))
    def test_encloses_true_value(self, n, g, bits):
        c = frac_pow(n, g, bits)
        with mpmath.workdps(150):  # oracle must out-resolve 256 bits
            true = mpmath.mpf(n) ** (mpmath.mpf(g.num) / g.den)
            lo = mpmath.mpf(c.scaled - c.err_ulp) / 2 ** bits
            hi = mpmath.mpf(c.scaled + c.err_ulp) / 2 ** bits
            assert lo <= true <= hi

    def test_exact_power_has_zero_error(self):
        c = frac_pow(27, RationalExponent.parse("2/3"))
        assert c.err_ulp == 0 and c.floor() == 9

    def test_ambiguous_floor(self):
        c = CertifiedFrac(3, 0, 64, 1)  # interval straddles 3
        with pytest.raises(AmbiguousFloor):
            c.floor()

    def test_negation_floor(self):
        c = frac_pow(2, RationalExponent.parse("2/3"))
        assert (-c).floor() == -2

    def test_from_fraction_roundtrip(self):
        x = Fraction(7, 3)
        c = CertifiedFrac.from_fraction(x, 128)
        assert abs(c.to_fraction() - x) <= Fraction(c.err_ulp + 1, 2 ** 128)

    def test_precision_limits(self):
        g = RationalExponent.parse("2/3")
        with pytest.raises(ValueError):
            frac_pow(5, g, MAX_BITS + 1)
        with pytest.raises(ValueError):
            frac_pow(5, g, 32)

    def test_known_value(self):
        c = frac_pow(2, RationalExponent.parse("2/3"))
        assert float(c) == pytest.approx(2 ** (2 / 3), rel=1e-15)


class TestPsi:
    @given(st.fractions(min_value=-1000, max_value=1000))
    def test_range(self, t):
        v = psi(t)
        assert -0.5 <= v < 0.5

    def test_values(self):
        assert psi(Fraction(1, 4)) == -0.25
        assert psi(3) == -0.5
        assert psi(frac_pow(2, RationalExponent.parse("2/3"))) == pytest.approx(0.0874010519681994)


class TestMembership:
    def test_small_example(self):
        g = RationalExponent.parse("2/3")
        assert [m for m in range(1, 11) if is_ps_member(m, g)] == [1, 2, 5, 8]

    def test_gamma_one_is_everything(self):
        g = RationalExponent.parse("1")
        assert all(is_ps_member(m, g) for m in range(1, 200))

    @given(exponents)
    def test_against_forward_enumeration(self, g):
        limit = 3000
        fwd = forward_set(limit, g)
        mine = {m for m in range(1, limit + 1) if is_ps_member(m, g)}
        assert mine == fwd

    @pytest.mark.parametrize("gs", ["2/3", "7/10", "9/10", "19/20", "49/50"])
    def test_mask_range(self, gs):
        g = RationalExponent.parse(gs)
        mask = ps_member_mask_range(50_000, g)
        assert set(np.flatnonzero(mask).tolist()) == forward_set(50_000, g)

    @given(st.lists(st.integers(1, 10 ** 12), min_size=1, max_size=40), exponents)
    def test_mask_matches_scalar(self, ms, g):
        assert ps_member_mask(ms, g).tolist() == [is_ps_member(m, g) for m in ms]

    def test_density(self):
        # |N_g cap [1, x]| = floor(x^g) up to one
        g = RationalExponent.parse("9/10")
        x = 10 ** 6
        assert abs(int(ps_member_mask_range(x, g).sum()) - floor_pow(x, g)) <= 1


def test_pow_diff_array():
    g = RationalExponent.parse("7/10")
    ns = np.array([1, 10, 10 ** 6, 10 ** 12], dtype=np.int64)
    d = pow_diff_array(ns, g)
    for n, v in zip(ns.tolist(), d):
        exact = mpmath.mpf(n + 1) ** mpmath.mpf("0.7") - mpmath.mpf(n) ** mpmath.mpf("0.7")
        assert v == pytest.approx(float(exact), rel=1e-13)
