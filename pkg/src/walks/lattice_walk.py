"""
lattice_walk.py — The minuscule random walk W^(z) on X∨

Increments are i.i.d. on the Weyl orbit WΛ∨ of a minuscule coweight with
P(μ∨) = e^{⟨z,μ∨⟩} / ch V(Λ∨)(z). In ω∨ coordinates the pairing of a
coweight with the simple root α_i is its i-th coordinate, so the walls of
the dominant chamber are the coordinate hyperplanes.

Usage:
    from src.walks.lattice_walk import increment_law, sample_path
    law = increment_law(datum, Coweight((1,)), SpectralPoint((0.5,)))
    path = sample_path(law, Coweight((0,)), horizon=20, seed=42)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from src.errors import ConfigurationError
from src.roots.root_system import Coweight, RootDatum
from src.roots.weyl import weyl_orbit
from src.spectral.characters import (
    DEFAULT_WALL_TOLERANCE,
    SpectralPoint,
    require_dominant_z,
    require_minuscule,
)
from src.spectral.hecke import spherical_increment_weights
from src.walks.rng import SeededStream

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Data contract — increment law
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class IncrementLaw:
    """Law of one increment of a walk on a Weyl orbit.

    Attributes:
        datum:   Root datum the coweights live in.
        support: The orbit, lexicographically sorted.
        probs:   Positive probabilities aligned with ``support``.
    """
    datum: RootDatum
    support: Tuple[Coweight, ...]
    probs: np.ndarray

    @property
    def steps(self) -> np.ndarray:
        """``(k, r)`` integer array of the support (= simple-root pairings)."""
        return np.asarray([mu.coords for mu in self.support], dtype=np.int64)

    @property
    def size(self) -> int:
        return len(self.support)

    def index_of(self) -> Dict[Tuple[int, ...], int]:
        return {mu.coords: k for k, mu in enumerate(self.support)}

    def probability(self, mu: Coweight) -> float:
        return float(self.probs[self.index_of()[mu.coords]])


def _orbit_law(datum: RootDatum, big_lambda: Coweight, weights: np.ndarray) -> IncrementLaw:
    probs = weights / np.sum(weights)
    return IncrementLaw(datum, tuple(weyl_orbit(datum, big_lambda)), probs)


def increment_law(
    datum: RootDatum,
    big_lambda: Coweight,
    z: SpectralPoint,
    tolerance: Optional[float] = DEFAULT_WALL_TOLERANCE,
) -> IncrementLaw:
    """P(μ∨) ∝ e^{⟨z, μ∨⟩} on WΛ∨.

    Args:
        datum:      Root datum.
        big_lambda: Minuscule coweight Λ∨.
        z:          Spectral point.
        tolerance:  Wall tolerance for z; ``None`` accepts any z (z = 0
                    gives the uniform law).

    Raises:
        ConfigurationError: If Λ∨ is not minuscule.
        IllConditionedError: If z is within ``tolerance`` of a wall.
    """
    require_minuscule(datum, big_lambda)
    if tolerance is not None:
        require_dominant_z(datum, z, tolerance)
    orbit = weyl_orbit(datum, big_lambda)
    exponents = np.asarray([z.pair(mu) for mu in orbit], dtype=float)
    weights = np.exp(exponents - np.max(exponents))
    law = _orbit_law(datum, big_lambda, weights)
    logger.debug("Increment law  Λ=%s  z=%s  probs=%s", big_lambda.coords, z.u, np.round(law.probs, 6))
    return law


def spherical_increment_law(datum: RootDatum, big_lambda: Coweight, q: int) -> IncrementLaw:
    """Law of the diagonal part μ∨_ρ of a spherical increment (∝ q^{⟨Λ∨−w0μ∨,ρ⟩})."""
    weights = spherical_increment_weights(datum, big_lambda, q)
    return IncrementLaw(
        datum,
        tuple(mu for mu, _ in weights),
        np.asarray([float(w) for _, w in weights], dtype=float),
    )


def mean_drift_pairings(law: IncrementLaw) -> np.ndarray:
    """(⟨α_i, E[increment]⟩)_i."""
    return law.probs @ law.steps.astype(float)


def geometric_ruin_probability(law: IncrementLaw, i: int) -> float:
    """P(⟨α_i, W_t⟩ ever drops one level below its current value).

    The projection on α_i is a skip-free walk with steps in {−1, 0, 1}, so
    the probability is min(1, P(−1)/P(+1)).
    """
    k = law.datum.check_node(i)
    column = law.steps[:, k]
    up = float(np.sum(law.probs[column == 1]))
    down = float(np.sum(law.probs[column == -1]))
    if up <= down:
        return 1.0
    return down / up


# ---------------------------------------------------------------------------
# Data contract — a sampled path
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class WalkPath:
    """Trajectory of λ∨ + W^(z).

    Attributes:
        start:     Starting coweight.
        support:   ``(k, r)`` array of possible increments.
        steps:     Increment indices into ``support``, one per time step.
        positions: ``(T+1, r)`` array, ``positions[t] = start + W_t``.
        minima:    ``(T+1, r)`` running minima of ⟨α_i, W_s⟩, s ≤ t, of the
                   unshifted walk.
        rng_seed:  Seed the path was drawn with (``None`` if derived).
    """
    start: Coweight
    support: np.ndarray
    steps: np.ndarray
    positions: np.ndarray
    minima: np.ndarray
    rng_seed: Optional[int] = None

    @property
    def horizon(self) -> int:
        return len(self.steps)

    @property
    def increments(self) -> np.ndarray:
        return self.support[self.steps]


def build_path(
    start: Coweight, support: np.ndarray, steps: np.ndarray, rng_seed: Optional[int] = None
) -> WalkPath:
    """Assemble a ``WalkPath`` from its increments."""
    steps = np.asarray(steps, dtype=np.int64)
    increments = support[steps] if len(steps) else np.zeros((0, start.rank), dtype=np.int64)
    walk = np.vstack([np.zeros((1, start.rank), dtype=np.int64), np.cumsum(increments, axis=0)])
    return WalkPath(
        start=start,
        support=support,
        steps=steps,
        positions=walk + start.as_array(),
        minima=np.minimum.accumulate(walk, axis=0),
        rng_seed=rng_seed,
    )


def sample_path(law: IncrementLaw, start: Coweight, horizon: int, seed: int) -> WalkPath:
    """Draw λ∨ + W_t for t ≤ horizon from a seeded stream.

    Raises:
        ConfigurationError: If ``horizon < 0``.
    """
    if horizon < 0:
        raise ConfigurationError(f"Horizon must be ≥ 0, got {horizon!r}")
    law.datum.check_coweight(start)
    stream = SeededStream(seed)
    steps = stream.choice(law.size, horizon, law.probs) if horizon else np.zeros(0, dtype=np.int64)
    return build_path(start, law.steps, steps, rng_seed=seed)


def sample_increment_block(law: IncrementLaw, stream: SeededStream, n: int, horizon: int) -> np.ndarray:
    """``(n, horizon, r)`` block of i.i.d. increments for vectorised Monte Carlo."""
    idx = stream.generator.choice(law.size, size=(n, horizon), p=law.probs)
    return law.steps[idx]
