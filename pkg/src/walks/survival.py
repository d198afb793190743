"""
survival.py — Probability that λ∨ + W^(z) stays in the dominant chamber

Three independent routes:

  ┌─────────────┬──────────────────────────────────────────────────────┐
  │ reflection  │ closed form Σ_w sign(w) e^{⟨z, w(λ∨+ρ∨) − (λ∨+ρ∨)⟩}   │
  │ dp          │ exact finite-horizon forward recursion on a dense box │
  │ mc          │ seeded Monte Carlo with a binomial standard error     │
  └─────────────┴──────────────────────────────────────────────────────┘

The dp box tracks coordinate i up to a level M_i. Beyond M_i the walk is
treated as never returning to wall i; the probability of that event is
at most r_i^{M_i+1}, with r_i the geometric ruin probability of the
projected walk. When M_i ≥ λ_i + T no clamping can happen and the value is
the exact finite-horizon probability.

Usage:
    from src.walks.survival import survival_reflection, survival_dp
    survival_reflection(datum, Coweight((0,)), SpectralPoint((0.5,)))   # ≈ 0.632121
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.errors import ConfigurationError, StateSpaceCapError
from src.roots.root_system import Coweight, RootDatum
from src.roots.weyl import DEFAULT_ENUMERATION_CAP
from src.spectral.characters import (
    DEFAULT_WALL_TOLERANCE,
    SpectralPoint,
    require_dominant,
    require_dominant_z,
    stable_alternating_sum,
)
from src.walks.lattice_walk import (
    IncrementLaw,
    geometric_ruin_probability,
    increment_law,
    sample_increment_block,
)
from src.walks.rng import DEFAULT_CHUNK_SIZE, Chunk, chunked_map, pairwise_total

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 10_000_000
DEFAULT_FAR_TOLERANCE = 1e-13


# ---------------------------------------------------------------------------
# Result containers
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DPResult:
    """Outcome of the dynamic-programming route.

    Attributes:
        value:            Survival probability through the horizon.
        horizon:          Number of steps T.
        box_shape:        Tracked levels per coordinate (M_i + 1).
        truncation_bound: Upper bound on ``value − exact``; 0 when exact.
    """
    value: float
    horizon: int
    box_shape: Tuple[int, ...]
    truncation_bound: float

    @property
    def is_exact(self) -> bool:
        return self.truncation_bound == 0.0


@dataclass(frozen=True)
class MCEstimate:
    """Monte-Carlo mean with its standard error.

    Attributes:
        estimate: Sample mean.
        stderr:   Standard error of the mean.
        samples:  Number of replicates.
    """
    estimate: float
    stderr: float
    samples: int

    def sigma_distance(self, reference: float) -> float:
        """|estimate − reference| in units of stderr (0/0 counts as 0)."""
        delta = abs(self.estimate - reference)
        if self.stderr == 0.0:
            return 0.0 if delta == 0.0 else math.inf
        return delta / self.stderr

    def covers(self, reference: float, sigmas: float = 4.0, slack: float = 0.0) -> bool:
        return abs(self.estimate - reference) <= sigmas * self.stderr + slack


# ---------------------------------------------------------------------------
# Route 1 — reflection principle
# ---------------------------------------------------------------------------

def survival_reflection(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    big_lambda: Optional[Coweight] = None,
    tolerance: float = DEFAULT_WALL_TOLERANCE,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """P(λ∨ + W^(z) stays dominant forever), by the reflection principle.

    ``big_lambda`` is accepted for symmetry with the other routes; the value
    does not depend on the minuscule coweight driving the walk.
    """
    require_dominant(datum, lam)
    require_dominant_z(datum, z, tolerance)
    value = stable_alternating_sum(datum, lam + datum.rho_check(), z, cap)
    logger.debug("Survival  route=reflection  λ=%s  value=%.12g", lam.coords, value)
    return value


# ---------------------------------------------------------------------------
# Route 2 — forward dynamic programming
# ---------------------------------------------------------------------------

def _shift_axis(a: np.ndarray, axis: int, delta: int) -> np.ndarray:
    """Move mass one level along ``axis``; level 0 dies downward, the top level absorbs."""
    if delta == 0:
        return a
    top = a.shape[axis] - 1
    out = np.zeros_like(a)

    def at(sl) -> Tuple:
        index = [slice(None)] * a.ndim
        index[axis] = sl
        return tuple(index)

    if delta > 0:
        out[at(slice(1, top))] = a[at(slice(0, top - 1))]
        out[at(top)] = a[at(top - 1)] + a[at(top)]
    else:
        out[at(slice(0, top - 1))] = a[at(slice(1, top))]
        out[at(top)] = a[at(top)]
    return out


def _box_levels(
    law: IncrementLaw, lam: Coweight, horizon: int, far_tolerance: float
) -> Tuple[List[int], float]:
    levels: List[int] = []
    bound = 0.0
    for i in range(1, law.datum.rank + 1):
        exact_level = lam.coords[i - 1] + horizon
        ruin = geometric_ruin_probability(law, i)
        if ruin >= 1.0 or ruin == 0.0:
            far_level = exact_level
        else:
            far_level = max(math.ceil(math.log(far_tolerance) / math.log(ruin)) - 1, 1)
        level = min(exact_level, far_level)
        if level < exact_level:
            bound += ruin ** (level + 1)
        levels.append(level)
    return levels, bound


def survival_dp_result(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    big_lambda: Coweight,
    horizon: int,
    state_cap: int = DEFAULT_STATE_CAP,
    far_tolerance: float = DEFAULT_FAR_TOLERANCE,
    tolerance: float = DEFAULT_WALL_TOLERANCE,
) -> DPResult:
    """P(λ∨ + W_s dominant for all s ≤ T) with its truncation certificate.

    Raises:
        ConfigurationError: If ``horizon < 0``.
        StateSpaceCapError: If the tracked box exceeds ``state_cap`` cells.
    """
    if horizon < 0:
        raise ConfigurationError(f"Horizon must be ≥ 0, got {horizon!r}")
    datum.check_coweight(lam)
    law = increment_law(datum, big_lambda, z, tolerance)
    if not lam.is_dominant():
        return DPResult(0.0, horizon, (), 0.0)

    levels, bound = _box_levels(law, lam, horizon, far_tolerance)
    shape = tuple(level + 1 for level in levels)
    cells = int(np.prod(shape, dtype=np.int64))
    if cells > state_cap:
        raise StateSpaceCapError(f"DP box {shape!r} has {cells} cells, above the cap {state_cap}")

    mass = np.zeros(shape, dtype=float)
    mass[tuple(min(c, level) for c, level in zip(lam.coords, levels))] = 1.0
    steps = law.steps
    for _ in range(horizon):
        nxt = np.zeros_like(mass)
        for prob, step in zip(law.probs, steps):
            moved = mass
            for axis, delta in enumerate(step):
                moved = _shift_axis(moved, axis, int(delta))
            nxt += prob * moved
        mass = nxt

    value = float(np.sum(mass))
    logger.info(
        "Survival  route=dp  λ=%s  T=%d  box=%s  value=%.12g  bound=%.3g",
        lam.coords, horizon, shape, value, bound,
    )
    return DPResult(value, horizon, shape, bound)


def survival_dp(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    big_lambda: Coweight,
    horizon: int,
    state_cap: int = DEFAULT_STATE_CAP,
    far_tolerance: float = DEFAULT_FAR_TOLERANCE,
) -> float:
    """Finite-horizon survival probability (see ``survival_dp_result``)."""
    return survival_dp_result(datum, lam, z, big_lambda, horizon, state_cap, far_tolerance).value


# ---------------------------------------------------------------------------
# Route 3 — Monte Carlo
# ---------------------------------------------------------------------------

def survival_mc(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    big_lambda: Coweight,
    horizon: int,
    samples: int,
    seed: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """Fraction of sampled paths that stay dominant through the horizon.

    Raises:
        ConfigurationError: If ``samples < 1`` or ``horizon < 0``.
    """
    if samples < 1:
        raise ConfigurationError(f"Monte Carlo needs at least one sample, got {samples!r}")
    if horizon < 0:
        raise ConfigurationError(f"Horizon must be ≥ 0, got {horizon!r}")
    datum.check_coweight(lam)
    law = increment_law(datum, big_lambda, z)
    floor = -lam.as_array()

    def worker(chunk: Chunk) -> np.ndarray:
        if horizon == 0:
            return np.asarray([chunk.size if lam.is_dominant() else 0], dtype=float)
        block = sample_increment_block(law, chunk.stream, chunk.size, horizon)
        lowest = np.min(np.cumsum(block, axis=1), axis=1)
        alive = np.all(lowest >= floor, axis=1) & lam.is_dominant()
        return np.asarray([np.count_nonzero(alive)], dtype=float)

    survivors = float(pairwise_total(chunked_map(worker, samples, seed, threads, chunk_size))[0])
    estimate = survivors / samples
    stderr = math.sqrt(max(estimate * (1.0 - estimate), 0.0) / samples)
    logger.info(
        "Survival  route=mc  λ=%s  T=%d  n=%d  value=%.12g ± %.3g",
        lam.coords, horizon, samples, estimate, stderr,
    )
    return MCEstimate(estimate, stderr, samples)
