"""
root_system.py — Irreducible adjoint root data

Builds the root datum of an irreducible adjoint group from Bourbaki's
plates and exposes the lattice bookkeeping every other module consumes:

  • Coweights are integer vectors in the fundamental-coweight basis (ω∨).
  • Roots are integer vectors in the simple-root basis (α).
  • The canonical pairing ⟨root, coweight⟩ is then a plain dot product,
    and α_i∨ has ω∨-coordinates given by column i of the Cartan matrix.

Supported types: A_n (n ≥ 1), B_n (n ≥ 2), C_n (n ≥ 2), D_n (n ≥ 4), E6, E7.

Usage:
    from src.roots.root_system import build_root_datum, Coweight
    datum = build_root_datum("A", 2)
    datum.reflect(1, Coweight((1, 1)))      # → Coweight((-1, 2))
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.errors import ConfigurationError

# ---------------------------------------------------------------------------
# Module-level logger
# ---------------------------------------------------------------------------
logger = logging.getLogger(__name__)

# Known number of positive roots, used as a construction cross-check.
_POSITIVE_ROOT_COUNT = {
    "A": lambda n: n * (n + 1) // 2,
    "B": lambda n: n * n,
    "C": lambda n: n * n,
    "D": lambda n: n * (n - 1),
    "E": lambda n: {6: 36, 7: 63}[n],
}

_MIN_RANK: Dict[str, int] = {"A": 1, "B": 2, "C": 2, "D": 4}


# ---------------------------------------------------------------------------
# Data contract — a cocharacter
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Coweight:
    """Integer lattice point of X∨ = P∨ in fundamental-coweight coordinates.

    Attributes:
        coords: ``coords[i] = ⟨α_{i+1}, μ∨⟩`` — the pairings with the simple
                roots, since the ω∨ basis is dual to the simple roots.
    """
    coords: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.coords)

    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "Coweight") -> "Coweight":
        return Coweight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Coweight") -> "Coweight":
        return Coweight(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Coweight":
        return Coweight(tuple(-a for a in self.coords))

    def scaled(self, k: int) -> "Coweight":
        return Coweight(tuple(k * a for a in self.coords))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=np.int64)

    @classmethod
    def of(cls, values: Sequence[int]) -> "Coweight":
        return cls(tuple(int(v) for v in values))


# ---------------------------------------------------------------------------
# Euclidean realisations of the simple roots (Bourbaki plates)
# ---------------------------------------------------------------------------

def _unit(dim: int, i: int) -> List[Fraction]:
    v = [Fraction(0)] * dim
    v[i] = Fraction(1)
    return v


def _diff(dim: int, i: int, j: int) -> List[Fraction]:
    v = _unit(dim, i)
    v[j] -= 1
    return v


def _euclidean_simple_roots(family: str, n: int) -> List[List[Fraction]]:
    if family == "A":
        return [_diff(n + 1, i, i + 1) for i in range(n)]
    if family in ("B", "C", "D"):
        roots = [_diff(n, i, i + 1) for i in range(n - 1)]
        if family == "B":
            roots.append(_unit(n, n - 1))
        elif family == "C":
            roots.append([2 * c for c in _unit(n, n - 1)])
        else:
            last = _unit(n, n - 2)
            last[n - 1] = Fraction(1)
            roots.append(last)
        return roots
    # E6/E7 inside R^8, α1 = ½(e1 + e8 − e2 − … − e7).
    half = Fraction(1, 2)
    a1 = [half] + [-half] * 6 + [half]
    a2 = _unit(8, 0)
    a2[1] = Fraction(1)
    roots = [a1, a2] + [_diff(8, k + 1, k) for k in range(n - 2)]
    return roots


def _cartan_from_euclidean(simple: List[List[Fraction]]) -> np.ndarray:
    """``A[i][j] = ⟨α_i, α_j∨⟩ = 2(α_i, α_j) / (α_j, α_j)``."""
    r = len(simple)

    def dot(x: List[Fraction], y: List[Fraction]) -> Fraction:
        return sum((a * b for a, b in zip(x, y)), Fraction(0))

    cartan = np.zeros((r, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            value = 2 * dot(simple[i], simple[j]) / dot(simple[j], simple[j])
            if value.denominator != 1:
                raise ConfigurationError(f"Non-integral Cartan entry at {(i, j)!r}")
            cartan[i, j] = int(value)
    return cartan


# ---------------------------------------------------------------------------
# Core datum
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class RootDatum:
    """Irreducible adjoint root datum (X = Q, X∨ = P∨).

    Attributes:
        family:           One of ``"A"``, ``"B"``, ``"C"``, ``"D"``, ``"E"``.
        rank:             Number of simple roots r.
        cartan_matrix:    r×r integers, ``A[i][j] = ⟨α_i, α_j∨⟩``.
        positive_roots:   Positive roots in simple-root coordinates, sorted by
                          height (simple roots first, in node order).
        positive_coroots: ``positive_coroots[k]`` is the coroot of
                          ``positive_roots[k]`` in ω∨ coordinates.
        rho_pairings:     ``⟨ρ, ω_j∨⟩`` as exact rationals.
        w0_word:          A reduced word (1-based node labels) of w0.
        w0_action:        Signed permutation matrix of w0 on ω∨ coordinates.
    """
    family: str
    rank: int
    cartan_matrix: np.ndarray
    positive_roots: Tuple[Tuple[int, ...], ...]
    positive_coroots: Tuple[Tuple[int, ...], ...]
    rho_pairings: Tuple[Fraction, ...]
    w0_word: Tuple[int, ...]
    w0_action: np.ndarray

    @property
    def type_label(self) -> str:
        return f"{self.family}{self.rank}"

    # -- Lattice helpers ----------------------------------------------------

    def check_node(self, i: int) -> int:
        """Validate a 1-based node label and return its 0-based index."""
        if not 1 <= i <= self.rank:
            raise ConfigurationError(
                f"Node index {i!r} out of range 1..{self.rank} for {self.type_label}"
            )
        return i - 1

    def check_coweight(self, mu: Coweight) -> Coweight:
        if mu.rank != self.rank:
            raise ConfigurationError(
                f"Coweight {mu.coords!r} has rank {mu.rank}, expected {self.rank}"
            )
        return mu

    def coroot(self, i: int) -> Coweight:
        """Simple coroot α_i∨ in ω∨ coordinates (column i of the Cartan matrix)."""
        k = self.check_node(i)
        return Coweight.of(self.cartan_matrix[:, k])

    def fundamental_coweight(self, k: int) -> Coweight:
        idx = self.check_node(k)
        return Coweight(tuple(1 if j == idx else 0 for j in range(self.rank)))

    def rho_check(self) -> Coweight:
        """ρ∨, which pairs to 1 with every simple root."""
        return Coweight((1,) * self.rank)

    def zero(self) -> Coweight:
        return Coweight((0,) * self.rank)

    def highest_root(self) -> Tuple[int, ...]:
        return self.positive_roots[-1]

    # -- Reflections --------------------------------------------------------

    def reflection_matrix(self, i: int) -> np.ndarray:
        """Matrix of s_i on ω∨ coordinates: ``μ ↦ μ − ⟨α_i, μ⟩ α_i∨``."""
        k = self.check_node(i)
        return _coweight_reflections(self)[k]

    def root_reflection_matrix(self, i: int) -> np.ndarray:
        """Matrix of s_i on simple-root coordinates: ``β ↦ β − ⟨β, α_i∨⟩ α_i``."""
        k = self.check_node(i)
        return _root_reflections(self)[k]

    def reflect(self, i: int, mu: Coweight) -> Coweight:
        """Apply the simple reflection s_i (1-based) to a coweight."""
        k = self.check_node(i)
        self.check_coweight(mu)
        shift = mu.coords[k]
        if shift == 0:
            return mu
        column = self.cartan_matrix[:, k]
        return Coweight(tuple(int(c - shift * a) for c, a in zip(mu.coords, column)))

    def act_on_root(self, word: Sequence[int], root: Sequence) -> Tuple:
        """Apply ``s_{w1} s_{w2} … s_{wk}`` to a root (rightmost letter first).

        Entries may be ints or Fractions; the arithmetic stays exact.
        """
        vec = list(root)
        for letter in reversed(tuple(word)):
            k = self.check_node(letter)
            pairing = sum(vec[j] * int(self.cartan_matrix[j, k]) for j in range(self.rank))
            vec[k] = vec[k] - pairing
        return tuple(vec)

    def w0(self, mu: Coweight) -> Coweight:
        return Coweight.of(self.w0_action @ self.check_coweight(mu).as_array())

    # -- Pairings -----------------------------------------------------------

    def rho_pairing(self, mu: Coweight) -> Fraction:
        """Exact ⟨ρ, μ∨⟩ (half-integral in general)."""
        return sum((r * c for r, c in zip(self.rho_pairings, mu.coords)), Fraction(0))

    def is_regular(self, mu: Coweight) -> bool:
        """True when μ∨ pairs non-trivially with every positive root."""
        roots = _positive_root_array(self)
        return bool(np.all(roots @ mu.as_array() != 0))

    # -- Serialisation ------------------------------------------------------

    def to_json(self) -> Dict[str, object]:
        """JSON document used for golden fixtures and the ``datum`` command."""
        return {
            "type": self.family,
            "rank": self.rank,
            "cartan_matrix": self.cartan_matrix.tolist(),
            "positive_roots": [list(r) for r in self.positive_roots],
        }


# ---------------------------------------------------------------------------
# Cached matrices (RootDatum instances are shared through lru_cache)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _coweight_reflections(datum: RootDatum) -> Tuple[np.ndarray, ...]:
    r = datum.rank
    mats = []
    for k in range(r):
        m = np.eye(r, dtype=np.int64)
        m[:, k] -= datum.cartan_matrix[:, k]
        mats.append(m)
    return tuple(mats)


@lru_cache(maxsize=None)
def _root_reflections(datum: RootDatum) -> Tuple[np.ndarray, ...]:
    r = datum.rank
    mats = []
    for k in range(r):
        m = np.eye(r, dtype=np.int64)
        m[k, :] -= datum.cartan_matrix[:, k]
        mats.append(m)
    return tuple(mats)


@lru_cache(maxsize=None)
def _positive_root_array(datum: RootDatum) -> np.ndarray:
    return np.asarray(datum.positive_roots, dtype=np.int64)


def positive_root_array(datum: RootDatum) -> np.ndarray:
    """Positive roots as a ``(|Φ⁺|, r)`` integer array."""
    return _positive_root_array(datum)


def positive_coroot_array(datum: RootDatum) -> np.ndarray:
    """Positive coroots as a ``(|Φ⁺|, r)`` integer array in ω∨ coordinates."""
    return np.asarray(datum.positive_coroots, dtype=np.int64)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _root_coroot_closure(cartan: np.ndarray) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """All (root, coroot) pairs obtained from the simple ones by reflections."""
    r = cartan.shape[0]
    seeds = []
    for k in range(r):
        root = tuple(1 if j == k else 0 for j in range(r))
        coroot = tuple(int(v) for v in cartan[:, k])
        seeds.append((root, coroot))

    seen = {pair[0]: pair[1] for pair in seeds}
    frontier = list(seeds)
    while frontier:
        nxt = []
        for root, coroot in frontier:
            for k in range(r):
                pairing = sum(root[j] * int(cartan[j, k]) for j in range(r))
                if pairing == 0:
                    continue
                new_root = tuple(root[j] - (pairing if j == k else 0) for j in range(r))
                shift = coroot[k]
                new_coroot = tuple(coroot[j] - shift * int(cartan[j, k]) for j in range(r))
                if new_root not in seen:
                    seen[new_root] = new_coroot
                    nxt.append((new_root, new_coroot))
        frontier = nxt
    return list(seen.items())


def _w0_by_descent(cartan: np.ndarray) -> Tuple[Tuple[int, ...], np.ndarray]:
    """Reduce ρ∨ to −ρ∨ one simple reflection at a time."""
    r = cartan.shape[0]
    v = np.ones(r, dtype=np.int64)
    applied: List[int] = []
    matrix = np.eye(r, dtype=np.int64)
    while np.any(v > 0):
        k = int(np.argmax(v > 0))
        s = np.eye(r, dtype=np.int64)
        s[:, k] -= cartan[:, k]
        v = s @ v
        matrix = s @ matrix
        applied.append(k + 1)
    # matrix = s_{ik} … s_{i1}; as a word the last applied letter comes first.
    return tuple(reversed(applied)), matrix


@lru_cache(maxsize=None)
def build_root_datum(type_label: str, rank: int) -> RootDatum:
    """Construct the irreducible adjoint root datum of the given type.

    Args:
        type_label: ``"A"``, ``"B"``, ``"C"``, ``"D"`` or ``"E"`` (a trailing
                    rank such as ``"A2"`` is also accepted when it matches).
        rank:       Rank r of the datum.

    Returns:
        A ``RootDatum`` whose invariants have been checked.

    Raises:
        ConfigurationError: If the type/rank pair is not supported.
    """
    family = type_label.strip().upper()
    if len(family) > 1:
        suffix = family[1:]
        if not suffix.isdigit() or int(suffix) != rank:
            raise ConfigurationError(f"Type label {type_label!r} disagrees with rank {rank!r}")
        family = family[0]

    if family == "E":
        if rank not in (6, 7):
            raise ConfigurationError(f"Unsupported exceptional type E{rank}")
    elif family in _MIN_RANK:
        if rank < _MIN_RANK[family]:
            raise ConfigurationError(
                f"Unsupported type {family}{rank}: rank must be ≥ {_MIN_RANK[family]}"
            )
    else:
        raise ConfigurationError(f"Unsupported root system type {type_label!r}")

    logger.debug("Building root datum  type=%s%d", family, rank)
    cartan = _cartan_from_euclidean(_euclidean_simple_roots(family, rank))

    pairs = _root_coroot_closure(cartan)
    positive = [(root, coroot) for root, coroot in pairs if all(c >= 0 for c in root)]
    positive.sort(key=lambda rc: (sum(rc[0]), tuple(-c for c in rc[0])))
    expected = _POSITIVE_ROOT_COUNT[family](rank)
    if len(positive) != expected:
        raise ConfigurationError(
            f"Root closure produced {len(positive)} positive roots for {family}{rank}, "
            f"expected {expected}"
        )

    rho = tuple(
        Fraction(sum(root[j] for root, _ in positive), 2) for j in range(rank)
    )
    w0_word, w0_action = _w0_by_descent(cartan)

    datum = RootDatum(
        family=family,
        rank=rank,
        cartan_matrix=cartan,
        positive_roots=tuple(root for root, _ in positive),
        positive_coroots=tuple(coroot for _, coroot in positive),
        rho_pairings=rho,
        w0_word=w0_word,
        w0_action=w0_action,
    )
    _check_invariants(datum)
    logger.info(
        "Root datum ready  type=%s  |Φ⁺|=%d  ℓ(w0)=%d",
        datum.type_label, len(datum.positive_roots), len(w0_word),
    )
    return datum


def _check_invariants(datum: RootDatum) -> None:
    a = datum.cartan_matrix
    r = datum.rank
    for i in range(r):
        if a[i, i] != 2:
            raise ConfigurationError(f"Cartan diagonal entry {i} is {a[i, i]!r}")
        for j in range(r):
            if i != j and (a[i, j] > 0 or (a[i, j] == 0) != (a[j, i] == 0)):
                raise ConfigurationError(f"Cartan entries {(i, j)!r} violate the sign pattern")
    if not np.array_equal(datum.w0_action @ np.ones(r, dtype=np.int64), -np.ones(r, dtype=np.int64)):
        raise ConfigurationError("w0 does not send ρ∨ to −ρ∨")
    if len(datum.w0_word) != len(datum.positive_roots):
        raise ConfigurationError("Length of w0 differs from the number of positive roots")


def pair_root_coweight(datum: RootDatum, root: Sequence[int], mu: Coweight) -> int:
    """Canonical pairing ``⟨Σ c_i α_i, μ∨⟩ = Σ c_i · μ_i``."""
    datum.check_coweight(mu)
    if len(root) != datum.rank:
        raise ConfigurationError(f"Root {tuple(root)!r} has the wrong length")
    return int(sum(int(c) * m for c, m in zip(root, mu.coords)))


def reflect(datum: RootDatum, i: int, mu: Coweight) -> Coweight:
    """Module-level alias of ``RootDatum.reflect``."""
    return datum.reflect(i, mu)
