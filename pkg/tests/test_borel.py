"""
The Borel walk on PGL_n and its Monte-Carlo identities.

Core claims:
    - BorelElement multiplication is associative and matches matrix products
    - The N-part recursion equals the full matrix product read through NA
    - A certified subdiagonal no longer moves modulo T^high
    - Valuation gaps are geometric and independent across subdiagonals
    - E[φ_N(ϖ^{−λ∨} N_∞ ϖ^{λ∨})] is the survival probability of λ∨ + W
    - χ^{−1}ψ_χ is harmonic and W_χ is α-harmonic for the one-step kernels
"""

import math

import numpy as np
import pytest
from pytest import approx

from src.borel.simulation import (
    _run_batch,
    _SubdiagonalBatch,
    alpha_harmonicity_mc,
    batch_phi_N_conjugated,
    exp_functional_gap_law,
    harmonicity_mc,
    initial_state,
    matrix_route,
    pgl_datum,
    poisson_mc,
    run_to_stabilization,
    stabilization_margins,
    step_borel_walk,
    walk_law,
)
from src.borel.unipotent import (
    BorelElement,
    Unitriangular,
    chi_alpha_minus,
    entry_order,
    entry_shifts,
    exponent_vector,
    phi_N_conjugated,
)
from src.errors import ConfigurationError, PrecisionError, VerificationFailure
from src.padic.laurent import LaurentSeries
from src.roots.root_system import Coweight
from src.spectral.characters import SpectralPoint
from src.spectral.hecke import penalisation_ratio
from src.walks.rng import SeededStream


def exact_unitriangular(n, p, rng, length=3):
    """Unitriangular matrix whose entries are exact polynomials in O."""
    entries = {
        key: LaurentSeries.polynomial(p, 0, rng.integers(0, p, size=length).tolist())
        for key in entry_order(n)
    }
    return Unitriangular(n, p, {k: v for k, v in entries.items() if v.digits})


def same_nu(a, b):
    return a.agrees_with(b) and b.agrees_with(a)


# == 1. Group structure =====================================================

class TestBorelElement:
    def test_exponent_vector(self):
        assert exponent_vector(Coweight((1, 2))) == (3, 2, 0)

    def test_entry_shifts_on_subdiagonal_are_pairings(self):
        shifts = entry_shifts(3, Coweight((1, 2)))
        assert shifts[(1, 0)] == 1
        assert shifts[(2, 1)] == 2
        assert shifts[(2, 0)] == 3

    def test_associativity(self, rng):
        a, b, c = (
            BorelElement(exact_unitriangular(3, 3, rng), Coweight(mu))
            for mu in ((1, 0), (-1, 2), (0, -1))
        )
        left = (a * b) * c
        right = a * (b * c)
        assert left.mu == right.mu
        assert same_nu(left.nu, right.nu)

    def test_product_matches_matrices(self, rng):
        a = BorelElement(exact_unitriangular(3, 5, rng), Coweight((2, -1)))
        b = BorelElement(exact_unitriangular(3, 5, rng), Coweight((1, 1)))
        nu, mu = (a.matrix() * b.matrix()).na_decomposition()
        assert mu == (a * b).mu
        assert same_nu(nu, (a * b).nu)

    def test_identity(self):
        e = BorelElement.identity(3, 3)
        assert e.mu == Coweight((0, 0))
        assert e.a_exponents == (0, 0, 0)

    def test_pgl_needs_two(self):
        with pytest.raises(ConfigurationError):
            pgl_datum(1)


# == 2. N-part recursion ====================================================

class TestRecursion:
    def test_recursion_matches_matrix_route(self, rng):
        n, p, high = 3, 3, 6
        law = walk_law(n, SpectralPoint.of((1.0, 1.0)), 1)
        index = law.index_of()
        # Stays in the dominant chamber so every factor has non-negative shifts.
        path = [(1, 0), (1, 0), (-1, 1), (1, 0), (0, -1)]
        n0 = exact_unitriangular(n, p, rng)
        state = initial_state(law, p, high, rng, n0=n0)
        increments = []
        for step in path:
            left, right = exact_unitriangular(n, p, rng), exact_unitriangular(n, p, rng)
            state = step_borel_walk(state, rng, increment=index[step], factors=(left, right))
            increments.append((left, Coweight(step), right))
        route = matrix_route(n0, increments)
        assert route.mu == state.position == Coweight((2, 0))
        assert same_nu(state.element.nu, route.nu)

    def test_identity_factors_keep_n(self, rng):
        law = walk_law(3, SpectralPoint.of((1.0, 1.0)), 1)
        n0 = exact_unitriangular(3, 3, rng)
        state = initial_state(law, 3, 6, rng, n0=n0)
        unit = Unitriangular.identity(3, 3)
        moved = step_borel_walk(state, rng, increment=0, factors=(unit, unit))
        assert same_nu(moved.element.nu, n0.truncate(6))
        assert moved.t == 1

    def test_pgl2_subdiagonal_is_partial_sum(self, rng):
        p = 3
        law = walk_law(2, SpectralPoint.of((0.5,)), 1)
        index = law.index_of()
        one = Unitriangular.elementary(2, p, 1, LaurentSeries.one(p))
        state = initial_state(law, p, 6, rng, n0=Unitriangular.identity(2, p))
        for step in ((1,), (1,), (-1,), (1,)):
            state = step_borel_walk(state, rng, increment=index[step], factors=(one, one))
        # 1 + 4T + 3T² reduced mod 3.
        chi = chi_alpha_minus(state.element.nu)[0]
        assert [chi.digit(k) for k in range(6)] == [1, 1, 0, 0, 0, 0]

    def test_margins(self):
        law = walk_law(2, SpectralPoint.of((0.5,)), 1)
        assert stabilization_margins(law, 1e-9) == (20,)
        with pytest.raises(ConfigurationError):
            stabilization_margins(law, 1.5)

    def test_stabilized_subdiagonal_does_not_move(self):
        result = run_to_stabilization(2, SpectralPoint.of((0.5,)), k=1, p=3, high=4, seed=17)
        state = result.state
        assert result.steps_used == state.t
        assert state.position.coords[0] >= 4 + 20
        rng = SeededStream(99).generator
        later = state
        for _ in range(100):
            later = step_borel_walk(later, rng)
        assert chi_alpha_minus(later.element.nu)[0].agrees_with(chi_alpha_minus(result.nu)[0])


# == 3. Valuation gaps ======================================================

@pytest.mark.slow
class TestGapLaw:
    def test_gaps_are_geometric(self):
        law = exp_functional_gap_law(2, SpectralPoint.of((0.5,)), 1, horizon=60, samples=3000, p=3, high=6, seed=4)
        assert law.samples == 3000
        assert np.all(law.bin_sigma_distances(1) < 5.0)

    def test_subdiagonals_are_independent(self):
        law = exp_functional_gap_law(3, SpectralPoint.of((1.0, 1.0)), 1, horizon=40, samples=3000, p=2, high=6, seed=8)
        assert np.all(law.bin_sigma_distances(2) < 5.0)
        assert law.independence_pvalue(1, 2) > 1e-4

    def test_independence_needs_two_subdiagonals(self):
        law = exp_functional_gap_law(2, SpectralPoint.of((0.5,)), 1, horizon=5, samples=10, p=3, high=4, seed=1)
        with pytest.raises(ConfigurationError):
            law.independence_pvalue(1, 2)


# == 4. Poisson kernel ======================================================

class TestPoisson:
    def test_origin_matches_survival(self, z_a1):
        estimate = poisson_mc(2, Coweight((0,)), z_a1, 1, samples=2000, p=3, high=2, seed=5)
        assert estimate.covers(1 - math.exp(-1.0), sigmas=5.0)

    def test_outside_chamber_vanishes(self, z_a1):
        estimate = poisson_mc(2, Coweight((-1,)), z_a1, 1, samples=2000, p=3, high=2, seed=6)
        assert estimate.covers(0.0, sigmas=5.0)

    def test_thread_independent(self, z_a1):
        args = (2, Coweight((0,)), z_a1, 1)
        single = poisson_mc(*args, samples=1500, p=3, high=2, seed=9, threads=1, chunk_size=500)
        pooled = poisson_mc(*args, samples=1500, p=3, high=2, seed=9, threads=3, chunk_size=500)
        assert single.estimate == pooled.estimate

    def test_horizon_must_reach_t_inverse(self, z_a1):
        with pytest.raises(PrecisionError):
            poisson_mc(2, Coweight((-2,)), z_a1, 1, samples=10, p=3, high=1, seed=1)

    def test_needs_samples(self, z_a1):
        with pytest.raises(ConfigurationError):
            poisson_mc(2, Coweight((0,)), z_a1, 1, samples=0, p=3, high=2, seed=1)

    def test_imaginary_residue_is_detected(self, monkeypatch, z_a1):
        def biased(self, exponent):
            return np.ones(self.digits.shape[:2], dtype=np.int64)

        monkeypatch.setattr(_SubdiagonalBatch, "digit", biased)
        with pytest.raises(VerificationFailure, match="Im φ_N"):
            poisson_mc(2, Coweight((0,)), z_a1, 1, samples=200, p=3, high=2, seed=1)

    @pytest.mark.parametrize("lam", [(0, 0), (-1, 0), (1, -1), (0, -2)])
    def test_batch_values_match_single_replicates(self, lam):
        law = walk_law(3, SpectralPoint.of((1.0, 1.0)), 1)
        outcome = _run_batch(law, 3, 3, 25, SeededStream(12).generator, margins=stabilization_margins(law, 1e-9))
        batch = batch_phi_N_conjugated(outcome.batch, Coweight(lam))
        for r in range(25):
            assert phi_N_conjugated(outcome.batch.replicate(r), Coweight(lam)) == approx(batch[r], abs=1e-12)

    @pytest.mark.parametrize("n,u,lam", [
        (2, (0.5,), (0,)), (2, (0.5,), (-1,)), (3, (1.0, 1.0), (0, 0)), (3, (1.0, 1.0), (-2, 1)),
    ])
    def test_stabilized_value_reads_t_inverse_digits(self, n, u, lam):
        result = run_to_stabilization(n, SpectralPoint.of(u), k=1, p=3, high=4, seed=23)
        digits = [chi.digit(-1 - l) for chi, l in zip(chi_alpha_minus(result.nu), lam)]
        expected = np.exp(2j * np.pi * (sum(digits) % 3) / 3)
        assert phi_N_conjugated(result.nu, Coweight(lam)) == approx(expected, abs=1e-12)


# == 5. Harmonicity =========================================================

@pytest.mark.slow
class TestHarmonicity:
    def test_harmonic_at_identity(self, z_a1):
        estimate = harmonicity_mc(2, BorelElement.identity(2, 3), z_a1, 1, samples=400, seed=3, p=3, high=4)
        assert estimate.rhs == approx(1.0)
        assert estimate.covers(sigmas=5.0)

    def test_harmonic_at_fundamental_coweight(self, z_a1):
        b = BorelElement.torus(2, 3, Coweight((1,)))
        estimate = harmonicity_mc(2, b, z_a1, 1, samples=400, seed=4, p=3, high=4)
        assert estimate.rhs == approx(1 + math.exp(-1.0))
        assert estimate.covers(sigmas=5.0)

    def test_alpha_harmonic_eigenvalue(self, a1, z_a1):
        estimate = alpha_harmonicity_mc(2, BorelElement.identity(2, 3), z_a1, 1, samples=400, seed=5, p=3, high=4)
        assert estimate.rhs.real == approx(penalisation_ratio(a1, Coweight((1,)), z_a1, 3))
        assert estimate.covers(sigmas=5.0)

    def test_alpha_needs_matching_residue_field(self, z_a1):
        with pytest.raises(ConfigurationError):
            alpha_harmonicity_mc(2, BorelElement.identity(2, 3), z_a1, 1, samples=10, seed=1, p=3, q=5)

    def test_alpha_needs_nonzero_base(self, z_a1):
        b = BorelElement.torus(2, 3, Coweight((-1,)))
        with pytest.raises(ConfigurationError):
            alpha_harmonicity_mc(2, b, z_a1, 1, samples=10, seed=1, p=3)

    def test_start_must_match_group(self, z_a1):
        with pytest.raises(ConfigurationError):
            harmonicity_mc(2, BorelElement.identity(3, 3), z_a1, 1, samples=10, seed=1, p=3)
