"""
hecke.py — q-dependent spectral quantities

Coset counts, the modular character, Macdonald's spherical function on
minuscule coweights, the Gindikin–Karpelevich product and the unramified
Whittaker values (Shintani–Casselman–Shalika).

Exponents of q are kept as exact rationals in ``QPower``; the real value
is produced on demand.

Usage:
    from src.spectral.hecke import scs_whittaker, coset_count_double
    scs_whittaker(datum, Coweight((1,)), SpectralPoint((0.5,)), q=3)   # ≈ 1.142402
    coset_count_double(datum, Coweight((1, 0)), q=2)                   # 7
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from src.errors import ConfigurationError
from src.roots.root_system import Coweight, RootDatum
from src.roots.weyl import DEFAULT_ENUMERATION_CAP, dominant_representative, weyl_orbit
from src.spectral.characters import (
    DEFAULT_WALL_TOLERANCE,
    SpectralPoint,
    alternating_tail,
    minuscule_character,
    require_dominant,
    require_dominant_z,
    require_minuscule,
    stable_alternating_sum,
    weyl_character,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Data contract
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class QPower:
    """The number q^exponent.

    Attributes:
        q:        Residue-field cardinality (≥ 2).
        exponent: Exact rational exponent.
    """
    q: int
    exponent: Fraction

    @property
    def value(self) -> float:
        return float(self.q) ** float(self.exponent)

    @property
    def is_integral(self) -> bool:
        return self.exponent.denominator == 1

    def exponent_text(self) -> str:
        """``"p/q"`` rendering used by the JSON reports."""
        e = self.exponent
        return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


def check_q(q: int) -> int:
    if int(q) != q or q < 2:
        raise ConfigurationError(f"Residue cardinality q must be an integer ≥ 2, got {q!r}")
    return int(q)


# ---------------------------------------------------------------------------
# Modular character and coset counts
# ---------------------------------------------------------------------------

def modular_character(datum: RootDatum, mu: Coweight, q: int) -> QPower:
    """q^{⟨2ρ, μ∨⟩}."""
    datum.check_coweight(mu)
    return QPower(check_q(q), 2 * datum.rho_pairing(mu))


def coset_count_intersection(datum: RootDatum, lam: Coweight, mu: Coweight, q: int) -> QPower:
    """Number of K-cosets in N ϖ^{−μ∨} K ∩ K ϖ^{−λ∨} K for μ∨ ∈ Wλ∨.

    Equals q^{⟨ρ, λ∨ − w0μ∨⟩}; a single coset when μ∨ = w0λ∨.

    Raises:
        ConfigurationError: If λ∨ is not dominant or μ∨ ∉ Wλ∨.
    """
    require_dominant(datum, lam)
    datum.check_coweight(mu)
    representative, _ = dominant_representative(datum, mu)
    if representative != lam:
        raise ConfigurationError(f"{mu.coords!r} is not in the Weyl orbit of {lam.coords!r}")
    exponent = datum.rho_pairing(lam - datum.w0(mu))
    return QPower(check_q(q), exponent)


def coset_count_double(datum: RootDatum, big_lambda: Coweight, q: int) -> int:
    """Card(K ϖ^{−Λ∨} K / K) = Σ_{μ∨ ∈ WΛ∨} q^{⟨Λ∨ − w0μ∨, ρ⟩} for minuscule Λ∨."""
    require_minuscule(datum, big_lambda)
    total = 0
    for mu in weyl_orbit(datum, big_lambda):
        power = coset_count_intersection(datum, big_lambda, mu, q)
        if not power.is_integral:
            raise ConfigurationError(f"Non-integral coset exponent {power.exponent!r}")
        total += check_q(q) ** int(power.exponent)
    return total


def spherical_increment_weights(
    datum: RootDatum, big_lambda: Coweight, q: int
) -> List[Tuple[Coweight, Fraction]]:
    """Exact law of the diagonal part of a spherical increment.

    P(μ∨) = q^{⟨Λ∨ − w0μ∨, ρ⟩} / Card(K ϖ^{−Λ∨} K / K) on the orbit WΛ∨.
    """
    card = coset_count_double(datum, big_lambda, q)
    return [
        (mu, Fraction(q ** int(coset_count_intersection(datum, big_lambda, mu, q).exponent), card))
        for mu in weyl_orbit(datum, big_lambda)
    ]


# ---------------------------------------------------------------------------
# Spherical function on minuscule coweights
# ---------------------------------------------------------------------------

def macdonald_minuscule(datum: RootDatum, big_lambda: Coweight, z: SpectralPoint, q: int) -> float:
    """S(Λ∨)(χ_z) = q^{⟨ρ,Λ∨⟩} · ch V(Λ∨)(z)."""
    require_minuscule(datum, big_lambda)
    power = QPower(check_q(q), datum.rho_pairing(big_lambda))
    return power.value * minuscule_character(datum, big_lambda, z)


def spherical_function_orbit_sum(
    datum: RootDatum, big_lambda: Coweight, z: SpectralPoint, q: int
) -> float:
    """Coefficient expansion Σ_μ Card(Nϖ^{−μ}K ∩ Kϖ^{−Λ}K) · q^{−⟨ρ,μ⟩} · e^{⟨z,μ⟩}.

    Restricted to the orbit WΛ∨; equals ``macdonald_minuscule``.
    """
    require_minuscule(datum, big_lambda)
    terms = []
    for mu in weyl_orbit(datum, big_lambda):
        count = coset_count_intersection(datum, big_lambda, mu, q)
        exponent = count.exponent - datum.rho_pairing(mu)
        terms.append(float(q) ** float(exponent) * math.exp(z.pair(mu)))
    return float(np.sum(terms))


def penalisation_ratio(datum: RootDatum, big_lambda: Coweight, z: SpectralPoint, q: int) -> float:
    """q^{⟨Λ∨,ρ⟩} ch V(Λ∨)(z) / Card(K ϖ^{−Λ∨} K / K).

    Relates the spherical increment law to the z-walk law:
    P_sph(μ) = ratio · P_z(μ) · q^{⟨ρ,μ⟩} e^{−⟨z,μ⟩}. It is also the
    eigenvalue of the α-harmonicity property of the Whittaker function.
    """
    return macdonald_minuscule(datum, big_lambda, z, q) / coset_count_double(datum, big_lambda, q)


# ---------------------------------------------------------------------------
# Gindikin–Karpelevich and Whittaker values
# ---------------------------------------------------------------------------

def _gk_numerator_log(pairings: np.ndarray, q: int) -> float:
    return float(np.sum(np.log1p(-np.exp(-pairings) / q)))


def gindikin_karpelevich(
    datum: RootDatum, z: SpectralPoint, q: int, tolerance: float = DEFAULT_WALL_TOLERANCE
) -> float:
    """c(z) = Π_{β∈Φ⁺} (1 − q⁻¹e^{−⟨β∨,z⟩}) / (1 − e^{−⟨β∨,z⟩})."""
    check_q(q)
    require_dominant_z(datum, z, tolerance)
    pairings = z.positive_coroot_pairings(datum)
    log_value = _gk_numerator_log(pairings, q) - float(np.sum(np.log(-np.expm1(-pairings))))
    return math.exp(log_value)


def gk_numerator(datum: RootDatum, z: SpectralPoint, q: int) -> float:
    """Π_{β∈Φ⁺} (1 − q⁻¹e^{−⟨β∨,z⟩})."""
    check_q(q)
    return math.exp(_gk_numerator_log(z.positive_coroot_pairings(datum), q))


def scs_whittaker(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    q: int,
    tolerance: float = DEFAULT_WALL_TOLERANCE,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """W_z(ϖ^{−λ∨}) = q^{−⟨ρ,λ∨⟩} ch V(λ∨)(z) Π_{β>0}(1 − q⁻¹e^{−⟨β∨,z⟩}); 0 off the chamber."""
    datum.check_coweight(lam)
    check_q(q)
    require_dominant_z(datum, z, tolerance)
    if not lam.is_dominant():
        return 0.0
    half_modular = QPower(q, -datum.rho_pairing(lam)).value
    return half_modular * weyl_character(datum, lam, z, tolerance, cap) * gk_numerator(datum, z, q)


def asymptotic_gap(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    q: Optional[int] = None,
    tolerance: float = DEFAULT_WALL_TOLERANCE,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Distance of the renormalised character from its limit deep in the chamber.

    Without ``q``: |e^{−⟨z,λ∨⟩} ch V(λ∨)(z) − b(z) e^{⟨z,ρ∨⟩}|. With ``q``
    both terms are multiplied by Π(1 − q⁻¹e^{−⟨β∨,z⟩}), which compares the
    normalised Whittaker value with c(z).

    The difference equals |S(λ∨+ρ∨) − 1| / S(ρ∨) and is summed without the
    identity term, so it stays accurate far below machine epsilon.
    """
    require_dominant(datum, lam)
    require_dominant_z(datum, z, tolerance)
    tail = alternating_tail(datum, lam + datum.rho_check(), z, cap)
    gap = abs(tail) / stable_alternating_sum(datum, datum.rho_check(), z, cap)
    if q is not None:
        gap *= gk_numerator(datum, z, q)
    return gap
