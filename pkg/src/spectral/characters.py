"""
characters.py — Spectral parameter and Weyl characters of the dual group

The Satake parameter z is only ever used through its pairings with
cocharacters, so ``SpectralPoint`` stores ``u[j] = ⟨z, ω_j∨⟩`` and every
character value is a sum of exponentials of integer combinations of u.

The alternating sums over W are evaluated in the stable form

    S(μ) = Σ_w sign(w) · exp(⟨z, wμ − μ⟩),

whose exponents are all ≤ 0 for dominant μ and dominant z, so nothing
overflows and the ratios below never divide huge numbers.

Usage:
    from src.spectral.characters import SpectralPoint, weyl_character
    z = SpectralPoint((0.5,))
    weyl_character(datum, Coweight((2,)), z)      # ≈ 4.086161
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from src.errors import ConfigurationError, IllConditionedError
from src.roots.root_system import Coweight, RootDatum, positive_coroot_array
from src.roots.weyl import DEFAULT_ENUMERATION_CAP, is_minuscule, weyl_orbit, weyl_table

logger = logging.getLogger(__name__)

DEFAULT_WALL_TOLERANCE = 1e-6


# ---------------------------------------------------------------------------
# Data contract — the spectral point z
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SpectralPoint:
    """Real Satake parameter z.

    Attributes:
        u: ``u[j] = ⟨z, ω_j∨⟩``, i.e. the simple-root coordinates of z.
    """
    u: Tuple[float, ...]

    @classmethod
    def of(cls, values: Sequence[float]) -> "SpectralPoint":
        return cls(tuple(float(v) for v in values))

    @classmethod
    def from_coroot_pairings(cls, datum: RootDatum, values: Sequence[float]) -> "SpectralPoint":
        """Build z from ``⟨z, α_i∨⟩``; the walls are then the coordinate planes."""
        c = np.asarray(values, dtype=float)
        if c.shape != (datum.rank,):
            raise ConfigurationError(f"Expected {datum.rank} coroot pairings, got {tuple(values)!r}")
        u = np.linalg.solve(datum.cartan_matrix.T.astype(float), c)
        return cls(tuple(float(x) for x in u))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.u, dtype=float)

    def pair(self, mu: Coweight) -> float:
        if len(mu.coords) != len(self.u):
            raise ConfigurationError(f"Coweight {mu.coords!r} does not match z of rank {len(self.u)}")
        return float(math.fsum(a * c for a, c in zip(self.u, mu.coords)))

    def coroot_pairings(self, datum: RootDatum) -> np.ndarray:
        """``⟨z, α_i∨⟩ = Σ_j A[j][i] u[j]`` for every simple coroot."""
        return datum.cartan_matrix.T.astype(float) @ self.vector

    def positive_coroot_pairings(self, datum: RootDatum) -> np.ndarray:
        return positive_coroot_array(datum).astype(float) @ self.vector

    def is_interior(self, datum: RootDatum, tolerance: float = 0.0) -> bool:
        return bool(np.all(self.coroot_pairings(datum) > tolerance))

    def act(self, datum: RootDatum, word: Sequence[int]) -> "SpectralPoint":
        """The Weyl translate w·z (w given as a reduced word)."""
        return SpectralPoint.of(datum.act_on_root(word, self.u))


def pair_z(z: SpectralPoint, mu: Coweight) -> float:
    """⟨z, μ∨⟩ = Σ_j u[j] · μ_j."""
    return z.pair(mu)


def require_dominant_z(
    datum: RootDatum, z: SpectralPoint, tolerance: float = DEFAULT_WALL_TOLERANCE
) -> np.ndarray:
    """Return the simple-coroot pairings of z after checking strict dominance.

    Raises:
        IllConditionedError: If some ⟨z, α_i∨⟩ is below ``tolerance``.
    """
    if len(z.u) != datum.rank:
        raise ConfigurationError(f"z has {len(z.u)} coordinates, expected {datum.rank}")
    pairings = z.coroot_pairings(datum)
    if np.any(pairings < tolerance):
        raise IllConditionedError(
            f"z = {z.u!r} lies within {tolerance:g} of a wall (coroot pairings {pairings.tolist()!r})"
        )
    return pairings


def require_dominant(datum: RootDatum, mu: Coweight, what: str = "λ∨") -> Coweight:
    datum.check_coweight(mu)
    if not mu.is_dominant():
        raise ConfigurationError(f"{what} = {mu.coords!r} is not dominant")
    return mu


def require_minuscule(datum: RootDatum, mu: Coweight) -> Coweight:
    if not is_minuscule(datum, mu):
        raise ConfigurationError(f"Coweight {mu.coords!r} is not minuscule in {datum.type_label}")
    return mu


# ---------------------------------------------------------------------------
# Alternating sums over W
# ---------------------------------------------------------------------------

def orbit_exponents(
    datum: RootDatum, mu: Coweight, z: SpectralPoint, cap: int = DEFAULT_ENUMERATION_CAP
) -> Tuple[np.ndarray, np.ndarray]:
    """``(⟨z, wμ⟩ for w ∈ W, sign(w))`` in the fixed enumeration order."""
    table = weyl_table(datum, cap)
    points = table.actions @ mu.as_array()
    return points.astype(float) @ z.vector, table.signs


def stable_alternating_sum(
    datum: RootDatum, mu: Coweight, z: SpectralPoint, cap: int = DEFAULT_ENUMERATION_CAP
) -> float:
    """S(μ) = Σ_w sign(w) e^{⟨z, wμ − μ⟩}."""
    exponents, signs = orbit_exponents(datum, mu, z, cap)
    return float(np.sum(signs * np.exp(exponents - z.pair(mu))))


def alternating_tail(
    datum: RootDatum, mu: Coweight, z: SpectralPoint, cap: int = DEFAULT_ENUMERATION_CAP
) -> float:
    """S(μ) − 1, summed without the identity term (the identity comes first)."""
    exponents, signs = orbit_exponents(datum, mu, z, cap)
    return float(np.sum(signs[1:] * np.exp(exponents[1:] - z.pair(mu))))


def weyl_denominator_sum(
    datum: RootDatum, z: SpectralPoint, cap: int = DEFAULT_ENUMERATION_CAP
) -> float:
    """Σ_w sign(w) e^{⟨z, wρ∨⟩}, the alternating side of the denominator identity."""
    exponents, signs = orbit_exponents(datum, datum.rho_check(), z, cap)
    return float(np.sum(signs * np.exp(exponents)))


def alternating_character(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    tolerance: float = DEFAULT_WALL_TOLERANCE,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Weyl's quotient of alternating sums at any W-regular z.

    Both sums are rescaled by their largest exponent, so the routine also
    works for z outside the dominant chamber (used for the W-symmetry check).

    Raises:
        IllConditionedError: If z is within ``tolerance`` of a reflecting hyperplane.
    """
    require_dominant(datum, lam)
    pairings = z.positive_coroot_pairings(datum)
    if np.any(np.abs(pairings) < tolerance):
        raise IllConditionedError(f"z = {z.u!r} is within {tolerance:g} of a reflecting hyperplane")
    shifted = lam + datum.rho_check()
    num_exp, signs = orbit_exponents(datum, shifted, z, cap)
    den_exp, _ = orbit_exponents(datum, datum.rho_check(), z, cap)
    num_top = float(np.max(num_exp))
    den_top = float(np.max(den_exp))
    numerator = float(np.sum(signs * np.exp(num_exp - num_top)))
    denominator = float(np.sum(signs * np.exp(den_exp - den_top)))
    return math.exp(num_top - den_top) * numerator / denominator


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------

def minuscule_character(datum: RootDatum, big_lambda: Coweight, z: SpectralPoint) -> float:
    """ch V(Λ∨)(z) = Σ_{μ∨ ∈ WΛ∨} e^{⟨z, μ∨⟩}; no dominance needed on z.

    Raises:
        ConfigurationError: If Λ∨ is not minuscule.
    """
    require_minuscule(datum, big_lambda)
    orbit = weyl_orbit(datum, big_lambda)
    exponents = np.asarray([z.pair(mu) for mu in orbit], dtype=float)
    return float(np.sum(np.exp(exponents)))


def weyl_character(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    tolerance: float = DEFAULT_WALL_TOLERANCE,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """ch V(λ∨)(z) by the Weyl character formula.

    Evaluated as ``e^{⟨z,λ∨⟩} · S(λ∨+ρ∨) / S(ρ∨)``.

    Raises:
        ConfigurationError: If λ∨ is not dominant.
        IllConditionedError: If z is not strictly dominant.
    """
    require_dominant(datum, lam)
    require_dominant_z(datum, z, tolerance)
    numerator = stable_alternating_sum(datum, lam + datum.rho_check(), z, cap)
    denominator = stable_alternating_sum(datum, datum.rho_check(), z, cap)
    value = math.exp(z.pair(lam)) * numerator / denominator
    logger.debug("ch V(%s)(z=%s) = %.12g", lam.coords, z.u, value)
    return value


def b_inverse_weyl_denominator(
    datum: RootDatum, z: SpectralPoint, tolerance: float = DEFAULT_WALL_TOLERANCE
) -> float:
    """b(z) = 1 / (e^{⟨z,ρ∨⟩} Π_{β∨>0} (1 − e^{−⟨z,β∨⟩}))."""
    require_dominant_z(datum, z, tolerance)
    pairings = z.positive_coroot_pairings(datum)
    log_denominator = z.pair(datum.rho_check()) + float(np.sum(np.log(-np.expm1(-pairings))))
    return math.exp(-log_denominator)


def normalized_psi(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    tolerance: float = DEFAULT_WALL_TOLERANCE,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """ch V(λ∨)(z) for dominant λ∨ and 0 otherwise."""
    datum.check_coweight(lam)
    require_dominant_z(datum, z, tolerance)
    if not lam.is_dominant():
        return 0.0
    return weyl_character(datum, lam, z, tolerance, cap)


def weyl_dimension(datum: RootDatum, lam: Coweight) -> int:
    """dim V(λ∨) = Π_{β>0} ⟨β, λ∨+ρ∨⟩ / ⟨β, ρ∨⟩, exactly."""
    require_dominant(datum, lam)
    shifted = lam + datum.rho_check()
    value = Fraction(1)
    for root in datum.positive_roots:
        value *= Fraction(
            sum(c * m for c, m in zip(root, shifted.coords)),
            sum(root),
        )
    if value.denominator != 1:
        raise ConfigurationError(f"Non-integral Weyl dimension {value!r}")
    return int(value)
