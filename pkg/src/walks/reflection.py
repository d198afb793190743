"""
reflection.py — Reflection transform, chamber functional and randomized starts

Paths are stopped at τ, the first time they meet a reflecting hyperplane
H_β = ker β (β ∈ Φ⁺). Minuscule steps change every ⟨β, ·⟩ by at most one,
so a path cannot change chamber without landing on such a hyperplane.
Ties are broken by the fixed order of ``datum.positive_roots`` (simple
roots first), which for paths started in the dominant chamber is the
simple-root index order.

The transform reflects the part of the path before τ by s_β. Starting
points drawn from ``randomized_start_law`` make the transform preserve
the law of the stopped path up to any finite horizon, hence

    E[F(start) · 1{τ ≤ T}] = 0   for every T.

Usage:
    from src.walks.reflection import stop_path, reflect_path
    stopped = stop_path(datum, path)
    reflect_path(reflect_path(stopped)).path.positions   # == stopped.path.positions
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.errors import ConfigurationError
from src.roots.root_system import Coweight, RootDatum, positive_coroot_array, positive_root_array
from src.roots.weyl import DEFAULT_ENUMERATION_CAP, dominant_representative, weyl_table
from src.spectral.characters import SpectralPoint, require_dominant
from src.walks.lattice_walk import IncrementLaw, WalkPath, build_path, sample_increment_block
from src.walks.rng import DEFAULT_CHUNK_SIZE, Chunk, SeededStream, chunked_map, pairwise_total
from src.walks.survival import MCEstimate

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Data contract
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class StoppedPath:
    """A path together with its first hyperplane hit.

    Attributes:
        datum:    Root datum of the walk.
        path:     The (shifted) path.
        tau:      First time on a reflecting hyperplane; ``None`` if it never
                  happens within the horizon.
        hit_root: Index into ``datum.positive_roots`` of the hyperplane hit
                  at τ (smallest index on ties), or ``None``.
    """
    datum: RootDatum
    path: WalkPath
    tau: Optional[int]
    hit_root: Optional[int]

    @property
    def hit_wall(self) -> Optional[int]:
        """1-based simple-root label when the hyperplane at τ is a simple wall."""
        if self.hit_root is None or self.hit_root >= self.datum.rank:
            return None
        return self.hit_root + 1


def _first_hits(datum: RootDatum, positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """τ and hit-root index for a batch of paths of shape ``(n, T+1, r)``.

    τ is ``T+1`` (and the root index −1) for paths that never touch a hyperplane.
    """
    pairings = positions @ positive_root_array(datum).T
    on_wall = pairings == 0
    touched = np.any(on_wall, axis=2)
    horizon = positions.shape[1]
    tau = np.where(np.any(touched, axis=1), np.argmax(touched, axis=1), horizon)
    hit = np.full(len(tau), -1, dtype=np.int64)
    hit_mask = tau < horizon
    rows = np.nonzero(hit_mask)[0]
    hit[rows] = np.argmax(on_wall[rows, tau[rows], :], axis=1)
    return tau, hit


def stop_path(datum: RootDatum, path: WalkPath) -> StoppedPath:
    """Locate τ and the hyperplane hit first on a single path."""
    tau, hit = _first_hits(datum, path.positions[np.newaxis])
    if tau[0] > path.horizon:
        return StoppedPath(datum, path, None, None)
    return StoppedPath(datum, path, int(tau[0]), int(hit[0]))


def reflect_coweight(datum: RootDatum, root_index: int, mu: np.ndarray) -> np.ndarray:
    """s_β(μ) = μ − ⟨β, μ⟩ β∨ for β = ``positive_roots[root_index]``, batched over rows."""
    root = positive_root_array(datum)[root_index]
    coroot = positive_coroot_array(datum)[root_index]
    pairing = np.asarray(mu) @ root
    return np.asarray(mu) - np.multiply.outer(pairing, coroot)


def reflect_path(stopped: StoppedPath) -> StoppedPath:
    """Apply s_β to the positions before τ; identity when τ is not reached.

    The result is again stopped at the same τ on the same hyperplane, and
    applying the transform twice gives back the original path.
    """
    if stopped.tau is None or stopped.tau == 0:
        return stopped
    datum = stopped.datum
    path = stopped.path
    tau = stopped.tau
    positions = path.positions.copy()
    positions[:tau] = reflect_coweight(datum, stopped.hit_root, positions[:tau])

    lookup = {tuple(int(c) for c in row): k for k, row in enumerate(path.support)}
    increments = np.diff(positions, axis=0)
    try:
        steps = np.asarray([lookup[tuple(int(c) for c in row)] for row in increments], dtype=np.int64)
    except KeyError as exc:
        raise ConfigurationError(f"Reflected increment {exc.args[0]!r} leaves the step orbit") from exc
    reflected = build_path(Coweight.of(positions[0]), path.support, steps, rng_seed=None)
    return StoppedPath(datum, reflected, tau, stopped.hit_root)


# ---------------------------------------------------------------------------
# Chamber functional
# ---------------------------------------------------------------------------

def functional_F(datum: RootDatum, start: Coweight) -> int:
    """Σ_w sign(w) 1{start ∈ wC∨} = sign of the chamber containing ``start``.

    Raises:
        ConfigurationError: If ``start`` lies on a reflecting hyperplane.
    """
    datum.check_coweight(start)
    if not datum.is_regular(start):
        raise ConfigurationError(f"Start {start.coords!r} is not W-regular")
    _, count = dominant_representative(datum, start)
    return -1 if count % 2 else 1


# ---------------------------------------------------------------------------
# Randomized starting point
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class StartLaw:
    """Law of w(λ∨+ρ∨) with P ∝ e^{⟨z, w(λ∨+ρ∨)⟩}.

    Attributes:
        points: ``(|W|, r)`` orbit points in the enumeration order of W.
        signs:  sign(w) for each point, i.e. F(point).
        probs:  Probabilities aligned with ``points``.
    """
    points: np.ndarray
    signs: np.ndarray
    probs: np.ndarray

    def probability(self, mu: Coweight) -> float:
        matches = np.all(self.points == mu.as_array(), axis=1)
        return float(np.sum(self.probs[matches]))


def randomized_start_law(
    datum: RootDatum, lam: Coweight, z: SpectralPoint, cap: int = DEFAULT_ENUMERATION_CAP
) -> StartLaw:
    """Starting law that makes the reflection transform law-preserving."""
    require_dominant(datum, lam)
    table = weyl_table(datum, cap)
    points = table.actions @ (lam + datum.rho_check()).as_array()
    exponents = points.astype(float) @ z.vector
    weights = np.exp(exponents - np.max(exponents))
    return StartLaw(points, table.signs.copy(), weights / np.sum(weights))


def _random_starts(law: StartLaw, stream: SeededStream, n: int) -> np.ndarray:
    return stream.generator.choice(len(law.probs), size=n, p=law.probs)


def _positions(starts: np.ndarray, increments: np.ndarray) -> np.ndarray:
    n, horizon, r = increments.shape
    walk = np.concatenate([np.zeros((n, 1, r), dtype=np.int64), np.cumsum(increments, axis=1)], axis=1)
    return walk + starts[:, np.newaxis, :]


def reflection_identity_mc(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    law: IncrementLaw,
    horizon: int,
    samples: int,
    seed: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """Monte-Carlo mean of F(start) · 1{τ ≤ T} under the randomized start.

    Raises:
        ConfigurationError: If ``samples < 1``.
    """
    if samples < 1:
        raise ConfigurationError(f"Monte Carlo needs at least one sample, got {samples!r}")
    start_law = randomized_start_law(datum, lam, z)

    def worker(chunk: Chunk) -> np.ndarray:
        chosen = _random_starts(start_law, chunk.stream, chunk.size)
        increments = sample_increment_block(law, chunk.stream, chunk.size, horizon)
        tau, _ = _first_hits(datum, _positions(start_law.points[chosen], increments))
        values = start_law.signs[chosen] * (tau <= horizon)
        return np.asarray([np.sum(values), np.sum(values * values)], dtype=float)

    total, squares = pairwise_total(chunked_map(worker, samples, seed, threads, chunk_size))
    mean = total / samples
    variance = max(squares / samples - mean * mean, 0.0)
    stderr = math.sqrt(variance / samples)
    logger.info("Reflection identity  T=%d  n=%d  mean=%.6g ± %.3g", horizon, samples, mean, stderr)
    return MCEstimate(mean, stderr, samples)


def reflection_law_samples(
    datum: RootDatum,
    lam: Coweight,
    z: SpectralPoint,
    law: IncrementLaw,
    horizon: int,
    time: int,
    samples: int,
    seed: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Positions at ``time`` of reflected paths and of independent unreflected paths.

    Both arrays have shape ``(samples, r)``; under the randomized start
    their laws coincide, which a two-sample test can check.
    """
    if not 0 <= time <= horizon:
        raise ConfigurationError(f"Observation time {time!r} outside [0, {horizon}]")
    start_law = randomized_start_law(datum, lam, z)
    root = SeededStream(seed)

    def draw(stream: SeededStream) -> np.ndarray:
        chosen = _random_starts(start_law, stream, samples)
        increments = sample_increment_block(law, stream, samples, horizon)
        return _positions(start_law.points[chosen], increments)

    paths = draw(root.fork(0))
    tau, hit = _first_hits(datum, paths)
    observed = paths[:, time, :].copy()
    flip = (tau <= horizon) & (time < tau)
    for k in np.unique(hit[flip]):
        rows = flip & (hit == k)
        observed[rows] = reflect_coweight(datum, int(k), observed[rows])

    fresh = draw(root.fork(1))[:, time, :]
    return observed, fresh
