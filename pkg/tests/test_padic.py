"""
Truncated Laurent series over F_p and the Haar-measure lemmas.

Core claims:
    - Unknown digits raise PrecisionError instead of reading as zero
    - Products and inverses keep exactly the precision they can certify
    - E[ψ(xU)] = 1{x ∈ O}
    - T^a U + T^b U′ has the law of T^min(a,b) U, and U + y that of U
    - Haar samples have P(val = g) = (1 − 1/p) p^−g
"""

import cmath

import numpy as np
import pytest
from pytest import approx

from src.errors import ConfigurationError, EnumerationCapError, PrecisionError
from src.padic.laurent import (
    EXHAUSTED,
    LaurentSeries,
    additive_character,
    check_prime,
    sample_haar_O,
    sample_haar_unit,
)
from src.padic.lemmas import (
    averaging_expectation_exact,
    haar_translation_distance,
    haar_valuation_probability,
    min_plus_law_distance,
    verify_padic_lemmas,
)


# == 1. Digits and precision ================================================

class TestDigits:
    def test_digits_inside_and_outside_window(self):
        x = LaurentSeries.from_digits(3, 0, [1, 2])
        assert x.digit(0) == 1
        assert x.digit(1) == 2
        assert x.digit(-5) == 0
        with pytest.raises(PrecisionError):
            x.digit(2)

    def test_digits_reduced_mod_p(self):
        assert LaurentSeries.from_digits(5, -1, [7, -1]).digits == (2, 4)

    def test_exact_polynomial_reads_zero_far_out(self):
        y = LaurentSeries.polynomial(3, 0, [2, 1])
        assert y.is_exact
        assert y.digit(1_000) == 0

    def test_valuation(self):
        assert LaurentSeries.from_digits(3, -2, [0, 1, 2]).valuation() == -1
        assert LaurentSeries.from_digits(3, 0, [0, 0]).valuation() is EXHAUSTED

    def test_integrality(self):
        assert LaurentSeries.polynomial(3, 0, [1]).is_integral()
        assert not LaurentSeries.monomial(3, -1).is_integral()
        with pytest.raises(PrecisionError):
            LaurentSeries.from_digits(3, -4, [0, 0]).is_integral()

    def test_non_prime(self):
        with pytest.raises(ConfigurationError):
            check_prime(9)


# == 2. Arithmetic ==========================================================

class TestArithmetic:
    def test_product_example(self):
        x = LaurentSeries.from_digits(3, 0, [1, 2])
        y = LaurentSeries.polynomial(3, 0, [2, 1])
        product = x * y
        assert product.digits == (2, 2)
        assert product.high == 2

    def test_sum_takes_smaller_horizon(self):
        x = LaurentSeries.from_digits(3, 0, [1, 1], high=2)
        y = LaurentSeries.polynomial(3, 0, [2, 2, 2])
        total = x + y
        assert total.high == 2
        assert total.valuation() is EXHAUSTED

    def test_subtraction_of_exact_values(self):
        x = LaurentSeries.polynomial(5, -1, [3, 4])
        assert (x - x).is_exact
        assert (x - x).digits == ()

    def test_inverse_of_one_plus_t(self):
        x = LaurentSeries.from_digits(3, 0, [1, 1, 0, 0])
        inv = x.inverse()
        assert inv.digits == (1, 2, 1, 2)
        assert inv.high == 4
        product = x * inv
        assert [product.digit(k) for k in range(4)] == [1, 0, 0, 0]

    def test_inverse_of_monomial_is_exact(self):
        inv = LaurentSeries.monomial(3, 2, 2).inverse()
        assert inv.is_exact
        assert inv.low == -2
        assert inv.digits == (2,)

    def test_inverse_of_exact_series_needs_precision(self):
        y = LaurentSeries.polynomial(3, 0, [1, 1])
        with pytest.raises(PrecisionError):
            y.inverse()
        assert y.inverse(precision=3).digits == (1, 2, 1)

    def test_inverse_of_zero(self):
        with pytest.raises(PrecisionError):
            LaurentSeries.from_digits(3, 0, [0, 0]).inverse()

    def test_shift_and_truncate(self):
        x = LaurentSeries.from_digits(3, 0, [1, 2])
        shifted = x.shift(3)
        assert (shifted.low, shifted.high) == (3, 5)
        cut = LaurentSeries.polynomial(3, 0, [1, 2, 1]).truncate(2)
        assert cut.digits == (1, 2)
        assert cut.high == 2

    def test_mismatched_fields(self):
        with pytest.raises(PrecisionError):
            LaurentSeries.one(3) + LaurentSeries.one(5)


# == 3. Characters and Haar sampling ========================================

class TestCharacterAndHaar:
    def test_character_trivial_on_integers(self):
        assert additive_character(LaurentSeries.polynomial(3, 0, [1, 2])) == 1

    def test_character_on_t_inverse(self):
        x = LaurentSeries.monomial(3, -1)
        assert additive_character(x) == approx(cmath.exp(2j * cmath.pi / 3))
        assert additive_character(x, twist=2) == approx(cmath.exp(-2j * cmath.pi / 3))

    def test_character_twist_must_be_unit(self):
        with pytest.raises(ConfigurationError):
            additive_character(LaurentSeries.monomial(3, -1), twist=3)

    def test_haar_sample_shape(self, rng):
        sample = sample_haar_O(5, 6, rng).series
        assert (sample.low, sample.high) == (0, 6)
        assert all(0 <= d < 5 for d in sample.digits)
        with pytest.raises(ConfigurationError):
            sample_haar_O(5, 0, rng)

    def test_haar_unit_has_unit_leading_digit(self, rng):
        for _ in range(50):
            assert sample_haar_unit(3, 4, rng).digit(0) != 0

    def test_haar_valuation_frequencies(self, rng):
        n = 3000
        hits = sum(1 for _ in range(n) if sample_haar_O(3, 8, rng).series.valuation() == 0)
        expected = haar_valuation_probability(3, 0)
        stderr = np.sqrt(expected * (1 - expected) / n)
        assert abs(hits / n - expected) < 5 * stderr


# == 4. Haar-measure lemmas =================================================

class TestLemmas:
    def test_averaging_vanishes_off_integers(self):
        assert abs(averaging_expectation_exact(LaurentSeries.monomial(3, -1))) < 1e-12
        assert abs(averaging_expectation_exact(LaurentSeries.monomial(3, -2))) < 1e-12
        assert abs(averaging_expectation_exact(LaurentSeries.polynomial(5, -3, [1, 4, 0, 2]), twist=4)) < 1e-12

    def test_averaging_is_one_on_integers(self):
        assert averaging_expectation_exact(LaurentSeries.polynomial(3, 0, [2, 1])) == approx(1.0)

    @pytest.mark.parametrize("a,b", [(0, 0), (0, 1), (2, 1), (1, 1)])
    def test_min_plus_law(self, a, b):
        assert min_plus_law_distance(a, b, 3, 3) == 0

    def test_min_plus_empty_window(self):
        with pytest.raises(ConfigurationError):
            min_plus_law_distance(3, 4, 3, 2)

    def test_translation_invariance(self):
        assert haar_translation_distance(LaurentSeries.polynomial(3, 0, [1, 2]), 3) == 0
        with pytest.raises(ConfigurationError):
            haar_translation_distance(LaurentSeries.monomial(3, -1), 3)

    def test_enumeration_bound(self):
        with pytest.raises(EnumerationCapError):
            min_plus_law_distance(0, 0, 3, 6, bound=100)

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_verify_table_passes(self, p):
        rows = verify_padic_lemmas(p, precision=3)
        assert rows
        assert {r.lemma for r in rows} == {"averaging", "min-plus", "translation"}
        assert all(r.passed for r in rows)

    def test_valuation_probabilities_sum_to_one(self):
        assert sum(haar_valuation_probability(3, g) for g in range(60)) == approx(1.0)
