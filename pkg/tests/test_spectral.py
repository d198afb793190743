"""
Characters of the dual group and the q-dependent spectral values.

Core claims:
    - Weyl character formula agrees with explicit orbit sums
    - ch V(λ∨)(z) = b(z) e^{⟨z,λ∨+ρ∨⟩} · P(survival)
    - The character is W-invariant in z
    - Coset counts, Macdonald's formula and the penalisation ratio
    - W_z(ϖ^{−λ∨}) vanishes off the chamber and tends to c(z) deep inside it
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from pytest import approx

from src.errors import ConfigurationError, IllConditionedError
from src.roots.root_system import Coweight, build_root_datum
from src.roots.weyl import minuscule_coweight, weyl_orbit
from src.spectral.characters import (
    SpectralPoint,
    alternating_character,
    b_inverse_weyl_denominator,
    minuscule_character,
    normalized_psi,
    require_dominant_z,
    weyl_character,
    weyl_denominator_sum,
    weyl_dimension,
)
from src.spectral.hecke import (
    QPower,
    asymptotic_gap,
    coset_count_double,
    gindikin_karpelevich,
    macdonald_minuscule,
    modular_character,
    penalisation_ratio,
    scs_whittaker,
    spherical_function_orbit_sum,
    spherical_increment_weights,
)
from src.walks.survival import survival_reflection


# == 1. Spectral point ======================================================

class TestSpectralPoint:
    def test_coroot_pairings_round_trip(self, a2, c2):
        for datum in (a2, c2):
            z = SpectralPoint.from_coroot_pairings(datum, (0.8, 1.6))
            assert z.coroot_pairings(datum) == approx([0.8, 1.6])

    def test_a1_pairing_is_twice_u(self, a1, z_a1):
        assert z_a1.coroot_pairings(a1) == approx([1.0])

    def test_wall_is_ill_conditioned(self, a1, a2):
        with pytest.raises(IllConditionedError):
            require_dominant_z(a1, SpectralPoint.of((0.0,)))
        with pytest.raises(IllConditionedError):
            require_dominant_z(a2, SpectralPoint.from_coroot_pairings(a2, (1.0, 1e-9)))

    def test_wrong_rank(self, a2, z_a1):
        with pytest.raises(ConfigurationError):
            require_dominant_z(a2, z_a1)


# == 2. Weyl characters =====================================================

class TestCharacters:
    def test_a1_explicit_sum(self, a1, z_a1):
        for k in range(6):
            explicit = sum(math.exp(0.5 * (k - 2 * j)) for j in range(k + 1))
            assert weyl_character(a1, Coweight((k,)), z_a1) == approx(explicit, rel=1e-13)

    def test_a1_docstring_value(self, a1, z_a1):
        assert weyl_character(a1, Coweight((2,)), z_a1) == approx(4.086161269630488, rel=1e-12)

    @pytest.mark.parametrize("family,rank,k", [("A", 2, 1), ("A", 3, 2), ("C", 2, 2), ("D", 4, 1)])
    def test_minuscule_matches_weyl_formula(self, family, rank, k):
        datum = build_root_datum(family, rank)
        z = SpectralPoint.from_coroot_pairings(datum, tuple(0.3 + 0.2 * i for i in range(rank)))
        big_lambda = minuscule_coweight(datum, k)
        assert minuscule_character(datum, big_lambda, z) == approx(weyl_character(datum, big_lambda, z), rel=1e-12)

    def test_character_at_zero_weight_is_one(self, c2):
        z = SpectralPoint.from_coroot_pairings(c2, (0.8, 1.6))
        assert weyl_character(c2, c2.zero(), z) == approx(1.0, rel=1e-14)

    def test_character_via_survival(self, a2):
        z = SpectralPoint.from_coroot_pairings(a2, (0.8, 1.6))
        for lam in (Coweight((0, 0)), Coweight((1, 0)), Coweight((2, 1))):
            via_walk = (
                b_inverse_weyl_denominator(a2, z)
                * math.exp(z.pair(lam + a2.rho_check()))
                * survival_reflection(a2, lam, z)
            )
            assert via_walk == approx(weyl_character(a2, lam, z), rel=1e-10)

    def test_weyl_invariance(self, a2):
        z = SpectralPoint.from_coroot_pairings(a2, (0.4, 0.7))
        lam = Coweight((2, 1))
        reference = alternating_character(a2, lam, z)
        for word in ((1,), (2,), (1, 2), (1, 2, 1)):
            assert alternating_character(a2, lam, z.act(a2, word)) == approx(reference, rel=1e-10)
        assert reference == approx(weyl_character(a2, lam, z), rel=1e-12)

    def test_denominator_identity(self, a3):
        z = SpectralPoint.from_coroot_pairings(a3, (0.5, 0.9, 1.3))
        product = math.exp(z.pair(a3.rho_check())) * float(
            np.prod(-np.expm1(-z.positive_coroot_pairings(a3)))
        )
        assert weyl_denominator_sum(a3, z) == approx(product, rel=1e-12)

    def test_non_dominant(self, a2):
        z = SpectralPoint.of((1.0, 1.0))
        with pytest.raises(ConfigurationError):
            weyl_character(a2, Coweight((-1, 0)), z)
        assert normalized_psi(a2, Coweight((-1, 0)), z) == 0.0

    @pytest.mark.parametrize("family,rank,lam,dim", [
        ("A", 1, (4,), 5), ("A", 2, (1, 1), 8), ("A", 3, (0, 1, 0), 6), ("C", 2, (0, 1), 4),
    ])
    def test_weyl_dimension(self, family, rank, lam, dim):
        assert weyl_dimension(build_root_datum(family, rank), Coweight(lam)) == dim

    def test_dimension_is_character_at_origin_limit(self, a2):
        z = SpectralPoint.from_coroot_pairings(a2, (1e-3, 1.3e-3))
        value = weyl_character(a2, Coweight((1, 1)), z, tolerance=1e-6)
        assert value == approx(8.0, rel=1e-3)


# == 3. Hecke quantities ====================================================

class TestHecke:
    def test_coset_counts(self, a1, a2, a3):
        assert coset_count_double(a1, Coweight((1,)), 5) == 6
        assert coset_count_double(a2, Coweight((1, 0)), 2) == 7
        assert coset_count_double(a3, Coweight((0, 1, 0)), 2) == 35

    def test_spherical_law_sums_to_one(self, c2):
        weights = spherical_increment_weights(c2, Coweight((0, 1)), 3)
        assert sum(w for _, w in weights) == 1
        assert {mu.coords for mu, _ in weights} == {mu.coords for mu in weyl_orbit(c2, Coweight((0, 1)))}

    @pytest.mark.parametrize("family,rank,k", [("A", 2, 1), ("A", 3, 2), ("C", 2, 2)])
    def test_macdonald_matches_orbit_expansion(self, family, rank, k):
        datum = build_root_datum(family, rank)
        z = SpectralPoint.from_coroot_pairings(datum, (0.7,) * rank)
        big_lambda = minuscule_coweight(datum, k)
        for q in (2, 3, 7):
            assert spherical_function_orbit_sum(datum, big_lambda, z, q) == approx(
                macdonald_minuscule(datum, big_lambda, z, q), rel=1e-12
            )

    def test_penalisation_ratio_a1(self, a1, z_a1):
        expected = math.sqrt(3) * 2 * math.cosh(0.5) / 4
        assert penalisation_ratio(a1, Coweight((1,)), z_a1, 3) == approx(expected, rel=1e-13)
        assert expected == approx(0.976554, abs=1e-6)

    def test_penalisation_ratio_a2(self, a2):
        z = SpectralPoint.of((0.4, 0.4))
        expected = 2 * (math.exp(0.4) + 1 + math.exp(-0.4)) / 7
        assert penalisation_ratio(a2, Coweight((1, 0)), z, 2) == approx(expected, rel=1e-13)

    def test_modular_character(self, a1, a2):
        assert modular_character(a2, Coweight((1, 0)), 3).exponent == 2
        assert modular_character(a2, Coweight((1, 0)), 3).value == approx(9.0)
        assert modular_character(a2, Coweight((-1, 0)), 2).value == approx(0.25)
        assert modular_character(a1, Coweight((1,)), 5).value == approx(5.0)

    def test_qpower(self):
        power = QPower(3, Fraction(1, 2))
        assert power.value == approx(math.sqrt(3))
        assert not power.is_integral
        assert power.exponent_text() == "1/2"


# == 4. Whittaker values ====================================================

class TestWhittaker:
    def test_a1_formula(self, a1, z_a1):
        expected = 3 ** -0.5 * 2 * math.cosh(0.5) * (1 - math.exp(-1.0) / 3)
        assert scs_whittaker(a1, Coweight((1,)), z_a1, 3) == approx(expected, rel=1e-13)

    def test_vanishes_off_chamber(self, a2, z_a2):
        assert scs_whittaker(a2, Coweight((-1, -1)), z_a2, 3) == 0.0
        assert scs_whittaker(a2, Coweight((2, -1)), z_a2, 3) == 0.0

    def test_value_at_origin_is_gk_numerator(self, a2, z_a2):
        expected = float(np.prod(1 - np.exp(-z_a2.positive_coroot_pairings(a2)) / 2))
        assert scs_whittaker(a2, a2.zero(), z_a2, 2) == approx(expected, rel=1e-13)

    def test_asymptotic_limit_is_gk(self, a1, z_a1):
        k = 40
        normalised = 3 ** (k / 2) * math.exp(-0.5 * k) * scs_whittaker(a1, Coweight((k,)), z_a1, 3)
        assert normalised == approx(gindikin_karpelevich(a1, z_a1, 3), rel=1e-12)

    @pytest.mark.parametrize("family,rank", [("A", 2), ("C", 2)])
    def test_gap_decreases_along_ray(self, family, rank):
        datum = build_root_datum(family, rank)
        z = SpectralPoint.from_coroot_pairings(datum, (0.8,) * rank)
        gaps = [asymptotic_gap(datum, Coweight((k,) * rank), z, 3) for k in range(30)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-8
