"""Field-arithmetic oracles: hand values, long division, exhaustive checks."""

import random

import pytest

from polylat.gfpoly import (
    DigitVector,
    GfPoly,
    Modulus,
    find_irreducible,
    is_irreducible,
    laurent_digits,
    poly_add,
    poly_divmod,
    poly_from_string,
    poly_mod,
    poly_mul,
    poly_mul_mod,
    poly_to_string,
    primitive_element,
    truncate_digits,
)


def P(b, *coeffs):
    return GfPoly(b, coeffs)


class TestPolyBasics:
    def test_canonical_form_strips_trailing_zeros(self):
        assert P(2, 1, 1, 0, 0).coeffs == (1, 1)
        assert P(2, 0, 0).coeffs == ()
        assert P(2).degree == float("-inf")
        assert P(3, 0, 0, 2).degree == 2

    def test_base_must_be_prime(self):
        with pytest.raises(ValueError):
            GfPoly(4, (1,))
        with pytest.raises(ValueError):
            GfPoly(1, (1,))

    def test_coefficients_must_be_reduced(self):
        with pytest.raises(ValueError):
            GfPoly(2, (2,))

    def test_int_encoding_roundtrip(self):
        for b in (2, 3, 5):
            for n in range(200):
                assert GfPoly.from_int(b, n).to_int() == n

    def test_string_form_constant_term_last(self):
        p = P(2, 1, 1, 1)  # x^2+x+1
        assert poly_to_string(p) == "111"
        assert poly_from_string(2, "111") == p
        assert poly_to_string(P(2, 1, 0, 1)) == "101"
        assert poly_to_string(GfPoly.zero(3)) == "0"


class TestAdd:
    def test_char2_self_cancellation(self):
        xp1 = P(2, 1, 1)
        assert poly_add(xp1, xp1).is_zero()

    def test_disjoint_supports(self):
        assert poly_add(P(2, 1, 0, 1), P(2, 0, 1)) == P(2, 1, 1, 1)

    def test_mod3_cancellation(self):
        assert poly_add(P(3, 1, 2), P(3, 2, 1)).is_zero()

    def test_base_mismatch_rejected(self):
        with pytest.raises(ValueError):
            poly_add(P(2, 1), P(3, 1))


class TestMulMod:
    def test_hand_long_division(self):
        # x * x mod (x^2+x+1) = x+1 over Z_2
        mod = Modulus(P(2, 1, 1, 1))
        assert poly_mul_mod(GfPoly.x(2), GfPoly.x(2), mod) == P(2, 1, 1)

    def test_identity_and_zero(self):
        mod = Modulus(P(2, 1, 1, 1))
        c = P(2, 1, 1)
        assert poly_mul_mod(GfPoly.one(2), c, mod) == c
        assert poly_mul_mod(GfPoly.zero(2), c, mod).is_zero()

    def test_mul_matches_schoolbook_mod5(self):
        rng = random.Random(11)
        for _ in range(50):
            a = GfPoly.from_int(5, rng.randrange(1, 5**4))
            c = GfPoly.from_int(5, rng.randrange(1, 5**4))
            prod = poly_mul(a, c)
            # evaluate both sides at a few field points
            for x in range(5):
                va = sum(co * x**i for i, co in enumerate(a.coeffs)) % 5
                vc = sum(co * x**i for i, co in enumerate(c.coeffs)) % 5
                vp = sum(co * x**i for i, co in enumerate(prod.coeffs)) % 5
                assert vp == (va * vc) % 5


def _is_irreducible_bruteforce(p):
    """Independent oracle: search for any monic divisor of degree 1..deg-1."""
    deg = int(p.degree)
    b = p.b
    for ddeg in range(1, deg):
        for low in range(b**ddeg):
            div = GfPoly.from_int(b, low + b**ddeg)
            if poly_mod(p, div).is_zero():
                return False
    return True


class TestIrreducibility:
    def test_hand_examples(self):
        assert is_irreducible(P(2, 1, 1, 1)) is True  # x^2+x+1
        assert is_irreducible(P(2, 1, 0, 1)) is False  # x^2+1 = (x+1)^2
        assert is_irreducible(GfPoly.x(2)) is True

    @pytest.mark.parametrize("b,mmax", [(2, 6), (3, 4), (5, 3)])
    def test_exhaustive_against_bruteforce(self, b, mmax):
        for m in range(1, mmax + 1):
            for low in range(b**m):
                p = GfPoly.from_int(b, low + b**m)
                assert is_irreducible(p) == _is_irreducible_bruteforce(p)

    @pytest.mark.parametrize("b,m", [(3, 6), (5, 5)])
    def test_sampled_against_bruteforce(self, b, m):
        rng = random.Random(5)
        for _ in range(40):
            p = GfPoly.from_int(b, rng.randrange(b**m, b ** (m + 1)))
            assert is_irreducible(p) == _is_irreducible_bruteforce(p)


class TestFindIrreducible:
    def test_hand_examples(self):
        assert find_irreducible(2, 2).poly == P(2, 1, 1, 1)
        assert find_irreducible(2, 1).poly == GfPoly.x(2)
        assert find_irreducible(3, 1).poly == GfPoly.x(3)

    def test_output_is_smallest_monic_irreducible(self):
        for b, m in [(2, 3), (2, 5), (3, 3), (5, 2)]:
            mod = find_irreducible(b, m)
            assert mod.m == m
            assert mod.poly.coeffs[-1] == 1  # monic
            enc = mod.poly.to_int()
            for smaller in range(b**m, enc):
                assert not is_irreducible(GfPoly.from_int(b, smaller))


class TestLaurentDigits:
    def test_inverse_of_modulus(self):
        mod = Modulus(P(2, 1, 1, 1))
        dv = laurent_digits(GfPoly.one(2), GfPoly.one(2), mod, 5)
        assert dv.digits == (0, 1, 1, 0, 1)

    def test_x_over_modulus(self):
        mod = Modulus(P(2, 1, 1, 1))
        dv = laurent_digits(GfPoly.one(2), GfPoly.x(2), mod, 3)
        assert dv.digits == (1, 1, 0)

    def test_zero_numerator(self):
        mod = Modulus(P(2, 1, 1, 1))
        assert laurent_digits(GfPoly.zero(2), GfPoly.one(2), mod, 4).digits == (0,) * 4

    @pytest.mark.parametrize("b,m", [(2, 4), (3, 3), (5, 2)])
    def test_reconstruction(self, b, m):
        # sum t_l x^{-l} * P must agree with n*q on all coefficients of
        # degree > deg(nq) - L; check by clearing denominators:
        # n*q*x^L  ==  (sum t_l x^{L-l}) * P + r with deg r < deg(P) ... i.e.
        # floor-division of n*q*x^L by P has quotient whose low L coefficients
        # are t_L..t_1 (plus the polynomial part above).
        rng = random.Random(3)
        mod = find_irreducible(b, m)
        L = 6
        for _ in range(25):
            n = GfPoly.from_int(b, rng.randrange(0, b**m))
            q = GfPoly.from_int(b, rng.randrange(1, b**m))
            dv = laurent_digits(n, q, mod, L)
            shifted = poly_mul(poly_mul(n, q), GfPoly(b, (0,) * L + (1,)))
            quotient, _ = poly_divmod(shifted, mod.poly)
            # digit l is the coefficient of x^{L-l} in floor(n*q*x^L / P)
            for ell in range(1, L + 1):
                coeff = quotient.coeffs[L - ell] if L - ell < len(quotient.coeffs) else 0
                assert coeff == dv.digits[ell - 1]


class TestTruncation:
    def test_truncates_expansion(self):
        dv = DigitVector(2, (0, 1, 1, 0, 1))
        t = truncate_digits(dv, 2)
        assert t.digits == (0, 1)
        assert t.value() == 0.25

    def test_zero(self):
        assert truncate_digits(DigitVector(2, (0, 0, 0)), 2).value() == 0.0

    def test_geometric_sum(self):
        assert truncate_digits(DigitVector(2, (1, 1, 1)), 3).value() == 7 / 8

    def test_insufficient_precision_rejected(self):
        with pytest.raises(ValueError):
            truncate_digits(DigitVector(2, (1,)), 2)

    @pytest.mark.parametrize("b,m", [(2, 5), (3, 3)])
    def test_value_range(self, b, m):
        rng = random.Random(9)
        for _ in range(100):
            digits = tuple(rng.randrange(b) for _ in range(m))
            v = DigitVector(b, digits).value()
            assert 0.0 <= v <= 1.0 - b ** (-m) + 1e-15


class TestPrimitiveElement:
    def test_hand_examples(self):
        assert primitive_element(Modulus(P(2, 1, 1, 1))) == GfPoly.x(2)
        assert primitive_element(find_irreducible(2, 1)) == GfPoly.one(2)
        assert primitive_element(find_irreducible(3, 1)) == P(3, 2)

    @pytest.mark.parametrize("b,m", [(2, 8), (3, 5), (5, 4), (2, 12)])
    def test_powers_enumerate_all_nonzero_residues(self, b, m):
        mod = find_irreducible(b, m)
        g = primitive_element(mod)
        seen = set()
        cur = GfPoly.one(b)
        for _ in range(b**m - 1):
            seen.add(cur.to_int())
            cur = poly_mul_mod(cur, g, mod)
        assert seen == set(range(1, b**m))
