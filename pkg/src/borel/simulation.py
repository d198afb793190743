"""
simulation.py — Borel random walk B_t(W^(z)) on PGL_n and its Monte Carlo

The walk is driven by the minuscule lattice walk W^(z) with Λ∨ = ω_k∨:

    B_0 = n_0,   B_{t+1} = B_t · n′_{t+1} ϖ^{−(W_{t+1} − W_t)} n_{t+1}

with n_0, n′_t, n_t Haar on N(O). Its NA decomposition is B_t = N_t ϖ^{−W_t}
modulo T(O) with

    N_{t+1} = N_t · (ϖ^{−W_t} n′_{t+1} ϖ^{W_t}) · (ϖ^{−W_{t+1}} n_{t+1} ϖ^{W_{t+1}}).

Once ⟨α_i, W_s⟩ ≥ high for every later s, the subdiagonal i of N_t no
longer moves modulo T^high. A subdiagonal is certified stabilized when the
geometric ruin bound of the projected walk makes a later return below the
horizon less likely than ``certificate_tolerance``.

Two implementations of the recursion:

  ┌──────────────────────┬────────────────────────────────────────────────┐
  │ step_borel_walk      │ one replicate, full unitriangular matrices     │
  │ _SubdiagonalBatch    │ many replicates in lockstep, subdiagonals only │
  └──────────────────────┴────────────────────────────────────────────────┘

The batched form uses χ_{α_i}^−(nn′) = χ_{α_i}^−(n) + χ_{α_i}^−(n′): each
subdiagonal of N_t is a sum of independent Haar elements placed at
T^{⟨α_i, W_s⟩}.

Usage:
    from src.borel.simulation import poisson_mc, run_to_stabilization
    result = run_to_stabilization(2, SpectralPoint((0.5,)), k=1, p=3, high=8, seed=7)
    poisson_mc(2, Coweight((0,)), SpectralPoint((0.5,)), k=1, samples=4096, p=3, high=4, seed=7)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.borel.unipotent import (
    BorelElement,
    LowerTriangular,
    Unitriangular,
    chi_alpha_minus,
    phi_N,
    sample_borel_haar,
    sample_conjugated_unipotent,
)
from src.errors import ConfigurationError, PrecisionError, StepCapError, VerificationFailure
from src.padic.laurent import LaurentSeries
from src.roots.root_system import Coweight, RootDatum, build_root_datum
from src.roots.weyl import minuscule_coweight
from src.spectral.characters import SpectralPoint, normalized_psi, require_dominant_z
from src.spectral.hecke import penalisation_ratio, scs_whittaker
from src.walks.lattice_walk import (
    IncrementLaw,
    WalkPath,
    build_path,
    geometric_ruin_probability,
    increment_law,
    spherical_increment_law,
)
from src.walks.rng import DEFAULT_CHUNK_SIZE, Chunk, SeededStream, chunked_map, pairwise_total
from src.walks.survival import MCEstimate

logger = logging.getLogger(__name__)

DEFAULT_STEP_CAP = 100_000
DEFAULT_PRECISION = 8
DEFAULT_CERTIFICATE_TOLERANCE = 1e-9
IMAGINARY_RESIDUE_TOLERANCE = 1e-10
IMAGINARY_RESIDUE_SIGMAS = 6.0
OVERFLOW = -1


# ---------------------------------------------------------------------------
# Setup helpers
# ---------------------------------------------------------------------------

def pgl_datum(n: int) -> RootDatum:
    """Root datum A_{n−1} of PGL_n."""
    if n < 2:
        raise ConfigurationError(f"PGL_n needs n ≥ 2, got {n!r}")
    return build_root_datum("A", n - 1)


def walk_law(n: int, z: SpectralPoint, k: int) -> IncrementLaw:
    """Increment law of W^(z) with Λ∨ = ω_k∨ on PGL_n."""
    datum = pgl_datum(n)
    return increment_law(datum, minuscule_coweight(datum, k), z)


def stabilization_margins(law: IncrementLaw, certificate_tolerance: float) -> Tuple[int, ...]:
    """Levels m_i such that ⟨α_i, W⟩ ≥ high + m_i certifies subdiagonal i.

    From level c the projected walk ever reaches high − 1 with probability
    r_i^{c − high + 1}, with r_i the geometric ruin probability.

    Raises:
        ConfigurationError: If some projection has no positive drift.
    """
    if not 0.0 < certificate_tolerance < 1.0:
        raise ConfigurationError(f"Certificate tolerance must lie in (0, 1), got {certificate_tolerance!r}")
    margins = []
    for i in range(1, law.datum.rank + 1):
        ruin = geometric_ruin_probability(law, i)
        if ruin >= 1.0:
            raise ConfigurationError(f"⟨α_{i}, W⟩ has no positive drift; N_t cannot stabilise")
        if ruin == 0.0:
            margins.append(0)
        else:
            margins.append(max(math.ceil(math.log(certificate_tolerance) / math.log(ruin)) - 1, 0))
    return tuple(margins)


# ---------------------------------------------------------------------------
# Data contract — one replicate
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BorelWalkState:
    """State (N_t, W_t) of the Borel walk.

    Attributes:
        element:    B_t modulo T(O) as the pair (N_t, W_t).
        law:        Increment law of the driving walk.
        steps:      Increment indices drawn so far (into ``law.support``).
        high:       Precision horizon of every subdiagonal of N_t.
        margins:    Stabilization margins per simple root.
        stabilized: Per-subdiagonal flags; once set they stay set.
    """
    element: BorelElement
    law: IncrementLaw
    steps: Tuple[int, ...]
    high: int
    margins: Tuple[int, ...]
    stabilized: Tuple[bool, ...]

    @property
    def t(self) -> int:
        return len(self.steps)

    @property
    def position(self) -> Coweight:
        return self.element.mu

    @property
    def lattice_path(self) -> WalkPath:
        start = self.law.datum.zero()
        return build_path(start, self.law.steps, np.asarray(self.steps, dtype=np.int64))

    @property
    def is_stabilized(self) -> bool:
        return all(self.stabilized)


def _flags(position: Coweight, high: int, margins: Sequence[int], previous: Sequence[bool]) -> Tuple[bool, ...]:
    return tuple(
        bool(done or c >= high + m) for done, c, m in zip(previous, position.coords, margins)
    )


def initial_state(
    law: IncrementLaw,
    p: int,
    high: int,
    rng: np.random.Generator,
    certificate_tolerance: float = DEFAULT_CERTIFICATE_TOLERANCE,
    n0: Optional[Unitriangular] = None,
) -> BorelWalkState:
    """B_0 = n_0 (Haar on N(O) unless ``n0`` is given), W_0 = 0."""
    n = law.datum.rank + 1
    zero = law.datum.zero()
    nu = n0 if n0 is not None else sample_conjugated_unipotent(n, p, high, zero, rng)
    margins = stabilization_margins(law, certificate_tolerance)
    return BorelWalkState(
        element=BorelElement(nu, zero),
        law=law,
        steps=(),
        high=high,
        margins=margins,
        stabilized=_flags(zero, high, margins, (False,) * law.datum.rank),
    )


def step_borel_walk(
    state: BorelWalkState,
    rng: np.random.Generator,
    increment: Optional[int] = None,
    factors: Optional[Tuple[Unitriangular, Unitriangular]] = None,
) -> BorelWalkState:
    """One step of the N-part recursion.

    Args:
        state:     Current state.
        rng:       Generator for the increment and the Haar factors.
        increment: Force the increment index instead of drawing it.
        factors:   Force (n′, n) ∈ N(O)² instead of drawing them; they are
                   conjugated here.

    Raises:
        PrecisionError: If a subdiagonal ends up known below the horizon.
    """
    law = state.law
    n = law.datum.rank + 1
    p = state.element.nu.p
    idx = int(rng.choice(law.size, p=law.probs)) if increment is None else int(increment)
    before = state.element.mu
    after = before + law.support[idx]

    if factors is None:
        left = sample_conjugated_unipotent(n, p, state.high, before, rng)
        right = sample_conjugated_unipotent(n, p, state.high, after, rng)
    else:
        left, right = factors[0].conjugate(before), factors[1].conjugate(after)

    nu = (state.element.nu * left * right).truncate(state.high)
    for i, chi in enumerate(chi_alpha_minus(nu)):
        if chi.high < state.high:
            raise PrecisionError(
                f"Subdiagonal {i + 1} known only mod T^{chi.high} at t={state.t + 1}; "
                f"horizon {state.high} exhausted"
            )
    return replace(
        state,
        element=BorelElement(nu, after),
        steps=state.steps + (idx,),
        stabilized=_flags(after, state.high, state.margins, state.stabilized),
    )


def matrix_route(
    n0: Unitriangular, increments: Sequence[Tuple[Unitriangular, Coweight, Unitriangular]]
) -> BorelElement:
    """B_t as a product of lower-triangular matrices, read back through NA decomposition."""
    n, p = n0.n, n0.p
    product = LowerTriangular.from_unitriangular(n0)
    for left, delta, right in increments:
        product = (
            product
            * LowerTriangular.from_unitriangular(left)
            * LowerTriangular.torus(n, p, delta)
            * LowerTriangular.from_unitriangular(right)
        )
    nu, mu = product.na_decomposition()
    return BorelElement(nu, mu)


@dataclass(frozen=True, eq=False)
class StabilizationResult:
    """N_∞ modulo T^high together with the walk that produced it.

    Attributes:
        nu:         Stabilized N-part.
        steps_used: Steps until every subdiagonal was certified.
        state:      Final walk state.
    """
    nu: Unitriangular
    steps_used: int
    state: BorelWalkState


def run_to_stabilization(
    n: int,
    z: SpectralPoint,
    k: int,
    p: int,
    high: int,
    seed: int,
    step_cap: int = DEFAULT_STEP_CAP,
    certificate_tolerance: float = DEFAULT_CERTIFICATE_TOLERANCE,
) -> StabilizationResult:
    """Iterate ``step_borel_walk`` until every subdiagonal is certified.

    Raises:
        StepCapError: If ``step_cap`` steps are not enough.
    """
    law = walk_law(n, z, k)
    rng = SeededStream(seed).generator
    state = initial_state(law, p, high, rng, certificate_tolerance)
    while not state.is_stabilized:
        if state.t >= step_cap:
            raise StepCapError(
                f"N_t did not stabilise within {step_cap} steps "
                f"(W_t = {state.position.coords!r}, horizon {high})"
            )
        state = step_borel_walk(state, rng)
    logger.debug("Stabilised  n=%d  p=%d  high=%d  steps=%d", n, p, high, state.t)
    return StabilizationResult(state.element.nu, state.t, state)


# ---------------------------------------------------------------------------
# Batched subdiagonal recursion
# ---------------------------------------------------------------------------
@dataclass
class _SubdiagonalBatch:
    """Digits of χ_{α_i}^−(N_t) for m replicates over the window [low, high)."""
    digits: np.ndarray
    low: int
    high: int
    p: int

    @classmethod
    def empty(cls, m: int, rank: int, p: int, high: int) -> "_SubdiagonalBatch":
        low = min(0, high - 1)
        return cls(np.zeros((m, rank, high - low), dtype=np.int64), low, high, p)

    def _widen(self, low: int) -> None:
        pad = self.low - low
        self.digits = np.concatenate(
            [np.zeros(self.digits.shape[:2] + (pad,), dtype=np.int64), self.digits], axis=2
        )
        self.low = low

    def add_haar(self, shifts: np.ndarray, active: np.ndarray, rng: np.random.Generator) -> None:
        """Add an independent Haar element times T^{shift} to every active subdiagonal."""
        live = active & (shifts < self.high)
        if not live.any():
            return
        lowest = int(shifts[live].min())
        if lowest < self.low:
            self._widen(lowest)
        positions = np.arange(self.low, self.high)
        mask = (positions[np.newaxis, np.newaxis, :] >= shifts[:, :, np.newaxis]) & live[:, :, np.newaxis]
        draw = rng.integers(0, self.p, size=self.digits.shape)
        self.digits = (self.digits + draw * mask) % self.p

    def digit(self, exponent: np.ndarray) -> np.ndarray:
        """``(m, rank)`` digits at per-subdiagonal exponents (zero below the window)."""
        if np.any(exponent >= self.high):
            raise PrecisionError(f"Digit beyond the precision horizon {self.high} requested")
        out = np.zeros(self.digits.shape[:2], dtype=np.int64)
        for i, k in enumerate(np.asarray(exponent, dtype=np.int64)):
            if k >= self.low:
                out[:, i] = self.digits[:, i, k - self.low]
        return out

    def replicate(self, r: int) -> Unitriangular:
        """Replicate r as a unitriangular matrix carrying only its subdiagonals."""
        n = self.digits.shape[1] + 1
        entries = {
            (i + 1, i): LaurentSeries.from_digits(self.p, self.low, self.digits[r, i].tolist(), self.high)
            for i in range(n - 1)
        }
        return Unitriangular(n, self.p, entries)

    def valuations(self) -> np.ndarray:
        """``(m, rank)`` valuations, ``OVERFLOW`` where no digit is nonzero."""
        nonzero = self.digits != 0
        first = np.argmax(nonzero, axis=2) + self.low
        return np.where(nonzero.any(axis=2), first, OVERFLOW)


@dataclass(frozen=True)
class _BatchOutcome:
    batch: _SubdiagonalBatch
    position: np.ndarray
    minima: np.ndarray
    steps_used: np.ndarray


def _run_batch(
    law: IncrementLaw,
    p: int,
    high: int,
    m: int,
    rng: np.random.Generator,
    horizon: Optional[int] = None,
    margins: Optional[Sequence[int]] = None,
    step_cap: int = DEFAULT_STEP_CAP,
) -> _BatchOutcome:
    """Run m replicates for ``horizon`` steps, or until certified when ``margins`` is given."""
    rank = law.datum.rank
    steps = law.steps
    batch = _SubdiagonalBatch.empty(m, rank, p, high)
    position = np.zeros((m, rank), dtype=np.int64)
    minima = position.copy()
    frozen = np.zeros((m, rank), dtype=bool)
    steps_used = np.zeros(m, dtype=np.int64)
    level = None if margins is None else high + np.asarray(margins, dtype=np.int64)

    batch.add_haar(position, ~frozen, rng)
    limit = horizon if horizon is not None else step_cap
    for t in range(limit):
        if level is not None and frozen.all():
            break
        nxt = position + steps[rng.choice(law.size, size=m, p=law.probs)]
        batch.add_haar(position, ~frozen, rng)
        batch.add_haar(nxt, ~frozen, rng)
        position = nxt
        np.minimum(minima, position, out=minima)
        if level is not None:
            was_done = frozen.all(axis=1)
            frozen |= position >= level
            steps_used[frozen.all(axis=1) & ~was_done] = t + 1

    if level is not None and not frozen.all():
        stuck = int(np.count_nonzero(~frozen.all(axis=1)))
        raise StepCapError(f"{stuck} of {m} replicates did not stabilise within {step_cap} steps")
    return _BatchOutcome(batch, position, minima, steps_used)


# ---------------------------------------------------------------------------
# Exponential functionals
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class GapLaw:
    """Samples of val χ_{α_i}^−(N_T) − min_{s≤T} ⟨α_i, W_s⟩.

    Attributes:
        p:    Residue characteristic.
        gaps: ``(samples, rank)``; ``OVERFLOW`` marks a subdiagonal with no
              nonzero digit inside the window.
    """
    p: int
    gaps: np.ndarray

    @property
    def samples(self) -> int:
        return len(self.gaps)

    def expected_probability(self, g: int) -> float:
        return (1.0 - 1.0 / self.p) * self.p ** (-g)

    def histogram(self, i: int, max_gap: int = 3) -> np.ndarray:
        """Counts for gaps 0 … max_gap on subdiagonal i (1-based)."""
        column = self.gaps[:, i - 1]
        return np.asarray([np.count_nonzero(column == g) for g in range(max_gap + 1)], dtype=np.int64)

    def bin_sigma_distances(self, i: int, max_gap: int = 3) -> np.ndarray:
        """|observed − expected| per bin in binomial standard errors."""
        counts = self.histogram(i, max_gap)
        n = self.samples
        expected = np.asarray([self.expected_probability(g) for g in range(max_gap + 1)])
        sigma = np.sqrt(expected * (1.0 - expected) / n)
        return np.abs(counts / n - expected) / sigma

    def independence_pvalue(self, i: int = 1, j: int = 2, bins: int = 3) -> float:
        """Chi-square contingency p-value for the gaps of subdiagonals i and j."""
        if self.gaps.shape[1] < max(i, j):
            raise ConfigurationError(f"Need at least {max(i, j)} subdiagonals for an independence test")

        def binned(column: np.ndarray) -> np.ndarray:
            return np.where(column == OVERFLOW, bins - 1, np.minimum(column, bins - 1))

        a, b = binned(self.gaps[:, i - 1]), binned(self.gaps[:, j - 1])
        table = np.zeros((bins, bins), dtype=np.int64)
        np.add.at(table, (a, b), 1)
        table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
        if min(table.shape) < 2:
            return 1.0
        return float(stats.chi2_contingency(table)[1])


def exp_functional_gap_law(
    n: int,
    z: SpectralPoint,
    k: int,
    horizon: int,
    samples: int,
    p: int,
    high: int,
    seed: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> GapLaw:
    """Sample the valuation gaps of the subdiagonals of N_T.

    Raises:
        ConfigurationError: If ``samples < 1`` or ``horizon < 0``.
    """
    if samples < 1:
        raise ConfigurationError(f"Monte Carlo needs at least one sample, got {samples!r}")
    if horizon < 0:
        raise ConfigurationError(f"Horizon must be ≥ 0, got {horizon!r}")
    law = walk_law(n, z, k)

    def worker(chunk: Chunk) -> np.ndarray:
        outcome = _run_batch(law, p, high, chunk.size, chunk.stream.generator, horizon=horizon)
        valuation = outcome.batch.valuations()
        return np.where(valuation == OVERFLOW, OVERFLOW, valuation - outcome.minima)

    gaps = np.concatenate(chunked_map(worker, samples, seed, threads, chunk_size), axis=0)
    logger.info(
        "Gap law  n=%d  p=%d  T=%d  samples=%d  P(gap=0)=%s",
        n, p, horizon, samples, np.round(np.mean(gaps == 0, axis=0), 4),
    )
    return GapLaw(p, gaps)


# ---------------------------------------------------------------------------
# Poisson kernel
# ---------------------------------------------------------------------------

def batch_phi_N_conjugated(batch: _SubdiagonalBatch, lam: Coweight) -> np.ndarray:
    """φ_N(ϖ^{−λ∨} N ϖ^{λ∨}) for every replicate of ``batch``.

    Reads digit −1 − ⟨α_i, λ∨⟩ of each subdiagonal; per replicate this is
    ``phi_N_conjugated(batch.replicate(r), lam)``.
    """
    total = np.sum(batch.digit(-1 - lam.as_array()), axis=1) % batch.p
    return np.exp(2j * np.pi * total / batch.p)


def poisson_mc(
    n: int,
    lam: Coweight,
    z: SpectralPoint,
    k: int,
    samples: int,
    p: int,
    high: int,
    seed: int,
    step_cap: int = DEFAULT_STEP_CAP,
    certificate_tolerance: float = DEFAULT_CERTIFICATE_TOLERANCE,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """Monte-Carlo mean of φ_N(ϖ^{−λ∨} N_∞ ϖ^{λ∨}).

    Conjugation by diag(1, −1, 1, …) preserves the law of N_∞ and
    conjugates φ_N, so the estimate averages Re φ_N. The mean of Im φ_N
    must vanish within ``IMAGINARY_RESIDUE_SIGMAS`` standard errors.

    Raises:
        ConfigurationError: If ``samples < 1``.
        PrecisionError: If ``high`` does not reach the T⁻¹ coefficient needed.
        StepCapError: If a replicate does not stabilise.
        VerificationFailure: If the imaginary residue is significant.
    """
    if samples < 1:
        raise ConfigurationError(f"Monte Carlo needs at least one sample, got {samples!r}")
    law = walk_law(n, z, k)
    law.datum.check_coweight(lam)
    needed = -1 - lam.as_array()
    if np.any(needed >= high):
        raise PrecisionError(
            f"Horizon {high} does not reach T^{int(needed.max())} needed for λ∨ = {lam.coords!r}"
        )
    margins = stabilization_margins(law, certificate_tolerance)

    def worker(chunk: Chunk) -> np.ndarray:
        outcome = _run_batch(
            law, p, high, chunk.size, chunk.stream.generator, margins=margins, step_cap=step_cap
        )
        phi = batch_phi_N_conjugated(outcome.batch, lam)
        return np.asarray([
            np.sum(phi.real),
            np.sum(phi.real ** 2),
            np.sum(phi.imag),
            np.sum(phi.imag ** 2),
            float(np.sum(outcome.steps_used)),
        ])

    re, re_squares, im, im_squares, steps = pairwise_total(
        chunked_map(worker, samples, seed, threads, chunk_size)
    )
    mean = re / samples
    stderr = math.sqrt(max(re_squares / samples - mean * mean, 0.0) / samples)
    imag_mean = im / samples
    imag_stderr = math.sqrt(max(im_squares / samples - imag_mean * imag_mean, 0.0) / samples)
    logger.debug("Poisson  imaginary residue %.3g ± %.3g", imag_mean, imag_stderr)
    if abs(imag_mean) > IMAGINARY_RESIDUE_SIGMAS * imag_stderr + IMAGINARY_RESIDUE_TOLERANCE:
        raise VerificationFailure(
            f"Mean of Im φ_N is {imag_mean:.3g} ± {imag_stderr:.3g}, expected 0 for λ∨ = {lam.coords!r}"
        )
    logger.info(
        "Poisson  n=%d  λ=%s  p=%d  high=%d  n=%d  mean steps=%.1f  value=%.12g ± %.3g",
        n, lam.coords, p, high, samples, steps / samples, mean, stderr,
    )
    return MCEstimate(mean, stderr, samples)


# ---------------------------------------------------------------------------
# Harmonicity
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class HarmonicityEstimate:
    """Monte-Carlo side of a mean-value identity against its exact side.

    Attributes:
        lhs:     Sample mean (complex in general).
        rhs:     Exact value.
        stderr:  Standard error of ``lhs`` (real and imaginary parts pooled).
        samples: Number of replicates.
    """
    lhs: complex
    rhs: complex
    stderr: float
    samples: int

    def sigma_distance(self) -> float:
        delta = abs(self.lhs - self.rhs)
        if self.stderr == 0.0:
            return 0.0 if delta == 0.0 else math.inf
        return delta / self.stderr

    def covers(self, sigmas: float = 4.0, slack: float = 0.0) -> bool:
        return abs(self.lhs - self.rhs) <= sigmas * self.stderr + slack


def harmonic_value(datum: RootDatum, nu: Unitriangular, mu: Coweight, z: SpectralPoint) -> complex:
    """(χ^{−1}ψ_χ)(nu · ϖ^{−μ∨}) = φ_N(nu) e^{−⟨z,μ∨⟩} ch V(μ∨)(z); 0 off the chamber."""
    psi = normalized_psi(datum, mu, z)
    if psi == 0.0:
        return 0j
    return phi_N(nu) * math.exp(-z.pair(mu)) * psi


def whittaker_value(datum: RootDatum, nu: Unitriangular, mu: Coweight, z: SpectralPoint, q: int) -> complex:
    """W_χ(nu · ϖ^{−μ∨}) = φ_N(nu) W_χ(ϖ^{−μ∨}); 0 off the chamber."""
    value = scs_whittaker(datum, mu, z, q)
    if value == 0.0:
        return 0j
    return phi_N(nu) * value


def _one_step_mean(
    b: BorelElement,
    law: IncrementLaw,
    evaluate,
    samples: int,
    p: int,
    high: int,
    seed: int,
    threads: int,
    chunk_size: int,
) -> Tuple[complex, float]:
    n = law.datum.rank + 1
    start = b.matrix()

    def worker(chunk: Chunk) -> np.ndarray:
        rng = chunk.stream.generator
        idx = rng.choice(law.size, size=chunk.size, p=law.probs)
        values = np.zeros(chunk.size, dtype=complex)
        for r in range(chunk.size):
            product = (
                start
                * sample_borel_haar(n, p, high, rng)
                * LowerTriangular.torus(n, p, law.support[idx[r]])
                * sample_borel_haar(n, p, high, rng)
            )
            nu, mu = product.na_decomposition()
            values[r] = evaluate(nu, mu)
        return np.asarray(
            [np.sum(values.real), np.sum(values.imag), np.sum(np.abs(values) ** 2)], dtype=float
        )

    re, im, squares = pairwise_total(chunked_map(worker, samples, seed, threads, chunk_size))
    mean = complex(re, im) / samples
    variance = max(squares / samples - abs(mean) ** 2, 0.0)
    return mean, math.sqrt(variance / samples)


def harmonicity_mc(
    n: int,
    b: BorelElement,
    z: SpectralPoint,
    k: int,
    samples: int,
    seed: int,
    p: int,
    high: int = DEFAULT_PRECISION,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> HarmonicityEstimate:
    """E[(χ^{−1}ψ_χ)(b · B_1)] against (χ^{−1}ψ_χ)(b).

    B_1 = b′ ϖ^{−μ∨} b″ with b′, b″ Haar on B(O) and μ∨ from the z-walk law.

    Raises:
        ConfigurationError: If ``samples < 1`` or ``b`` is not in PGL_n.
        PrecisionError: If ``high`` is too small to read φ_N.
    """
    if samples < 1:
        raise ConfigurationError(f"Monte Carlo needs at least one sample, got {samples!r}")
    if b.nu.n != n or b.nu.p != p:
        raise ConfigurationError(f"Start element lives in PGL_{b.nu.n} over F_{b.nu.p}, not PGL_{n} over F_{p}")
    law = walk_law(n, z, k)
    datum = law.datum
    rhs = harmonic_value(datum, b.nu, b.mu, z)
    lhs, stderr = _one_step_mean(
        b, law, lambda nu, mu: harmonic_value(datum, nu, mu, z),
        samples, p, high, seed, threads, chunk_size,
    )
    logger.info(
        "Harmonicity  n=%d  b=%s  lhs=%.6g%+.2gi  rhs=%.6g  ± %.3g",
        n, b.mu.coords, lhs.real, lhs.imag, rhs.real, stderr,
    )
    return HarmonicityEstimate(lhs, rhs, stderr, samples)


def alpha_harmonicity_mc(
    n: int,
    b: BorelElement,
    z: SpectralPoint,
    k: int,
    samples: int,
    seed: int,
    p: int,
    high: int = DEFAULT_PRECISION,
    q: Optional[int] = None,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> HarmonicityEstimate:
    """E[W_χ(b · B_1)] / W_χ(b) for the spherical walk, against its exact eigenvalue.

    B_1 = b′ ϖ^{−μ∨_ρ} b″ with μ∨_ρ drawn from the spherical increment law
    (∝ q^{⟨Λ∨ − w0μ∨, ρ⟩}); the eigenvalue is q^{⟨ρ,Λ∨⟩} ch V(Λ∨)(z) / Card.

    Raises:
        ConfigurationError: If q ≠ p or W_χ(b) = 0.
    """
    q = p if q is None else q
    if q != p:
        raise ConfigurationError(f"Residue field of F_{p}((T)) has {p} elements, not q={q!r}")
    if samples < 1:
        raise ConfigurationError(f"Monte Carlo needs at least one sample, got {samples!r}")
    datum = pgl_datum(n)
    require_dominant_z(datum, z)
    big_lambda = minuscule_coweight(datum, k)
    law = spherical_increment_law(datum, big_lambda, q)
    base = whittaker_value(datum, b.nu, b.mu, z, q)
    if base == 0:
        raise ConfigurationError(f"W_χ vanishes at b = ϖ^{{−{b.mu.coords!r}}}; choose a dominant coweight")
    mean, stderr = _one_step_mean(
        b, law, lambda nu, mu: whittaker_value(datum, nu, mu, z, q) / base,
        samples, p, high, seed, threads, chunk_size,
    )
    exact = penalisation_ratio(datum, big_lambda, z, q)
    logger.info(
        "α-harmonicity  n=%d  q=%d  b=%s  ratio=%.6g%+.2gi  exact=%.6g  ± %.3g",
        n, q, b.mu.coords, mean.real, mean.imag, exact, stderr,
    )
    return HarmonicityEstimate(mean, complex(exact), stderr, samples)

