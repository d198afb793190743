"""
weyl.py — Weyl group enumeration, orbits and minuscule coweights

Elements of W are enumerated by breadth-first search on the orbit of ρ∨,
which is regular, so each element w is identified with the point wρ∨.
A step s_i from w is length-increasing exactly when ⟨α_i, wρ∨⟩ > 0, which
lets the search emit elements layer by layer in order of length.

Usage:
    from src.roots.weyl import weyl_table, weyl_orbit, minuscule_coweights
    table = weyl_table(datum)
    table.actions[-1]          # matrix of w0 (the unique longest element)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from src.errors import ConfigurationError, EnumerationCapError
from src.roots.root_system import Coweight, RootDatum

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 1_000_000


# ---------------------------------------------------------------------------
# Data contract
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class WeylElement:
    """One element of the Weyl group.

    Attributes:
        word:   Reduced word, 1-based node labels; the element is
                ``s_{word[0]} s_{word[1]} …``.
        action: Integer r×r matrix of the element on ω∨ coordinates.
    """
    word: Tuple[int, ...]
    action: np.ndarray

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sign(self) -> int:
        return -1 if len(self.word) % 2 else 1

    def apply(self, mu: Coweight) -> Coweight:
        return Coweight.of(self.action @ mu.as_array())


@dataclass(frozen=True, eq=False)
class WeylTable:
    """Dense table of all elements of W, ordered by length then word.

    Attributes:
        words:   Reduced words, in enumeration order.
        actions: ``(|W|, r, r)`` integer array of ω∨-coordinate matrices.
        signs:   ``(|W|,)`` array of ±1.
    """
    words: Tuple[Tuple[int, ...], ...]
    actions: np.ndarray
    signs: np.ndarray

    def __len__(self) -> int:
        return len(self.words)

    def element(self, k: int) -> WeylElement:
        return WeylElement(word=self.words[k], action=self.actions[k])


# ---------------------------------------------------------------------------
# Group order (checked before any enumeration)
# ---------------------------------------------------------------------------

def weyl_group_order(datum: RootDatum) -> int:
    n = datum.rank
    family = datum.family
    if family == "A":
        return math.factorial(n + 1)
    if family in ("B", "C"):
        return 2 ** n * math.factorial(n)
    if family == "D":
        return 2 ** (n - 1) * math.factorial(n)
    return {6: 51_840, 7: 2_903_040}[n]


def _check_cap(datum: RootDatum, cap: int) -> int:
    order = weyl_group_order(datum)
    if order > cap:
        raise EnumerationCapError(
            f"|W({datum.type_label})| = {order} exceeds the enumeration cap {cap}"
        )
    return order


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def weyl_elements(
    datum: RootDatum, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[WeylElement]:
    """Yield every element of W once, in length-then-word order.

    The identity comes first and w0 last.

    Raises:
        EnumerationCapError: If |W| exceeds ``cap``.
    """
    _check_cap(datum, cap)
    r = datum.rank
    reflections = [datum.reflection_matrix(i + 1) for i in range(r)]

    identity = np.eye(r, dtype=np.int64)
    layer: Dict[Tuple[int, ...], Tuple[Tuple[int, ...], np.ndarray]] = {
        (1,) * r: ((), identity)
    }
    while layer:
        ordered = sorted(layer.items(), key=lambda item: item[1][0])
        for _, (word, action) in ordered:
            yield WeylElement(word=word, action=action)

        nxt: Dict[Tuple[int, ...], Tuple[Tuple[int, ...], np.ndarray]] = {}
        for point, (word, action) in ordered:
            for k in range(r):
                if point[k] <= 0:
                    continue
                s = reflections[k]
                new_point = tuple(int(v) for v in s @ np.asarray(point, dtype=np.int64))
                candidate = ((k + 1,) + word, s @ action)
                current = nxt.get(new_point)
                if current is None or candidate[0] < current[0]:
                    nxt[new_point] = candidate
        layer = nxt


@lru_cache(maxsize=32)
def _cached_table(datum: RootDatum, cap: int) -> WeylTable:
    elements = list(weyl_elements(datum, cap))
    table = WeylTable(
        words=tuple(e.word for e in elements),
        actions=np.stack([e.action for e in elements]),
        signs=np.asarray([e.sign for e in elements], dtype=np.int64),
    )
    logger.info("Enumerated W(%s): %d elements", datum.type_label, len(table))
    return table


def weyl_table(datum: RootDatum, cap: int = DEFAULT_ENUMERATION_CAP) -> WeylTable:
    """Cached dense table of W (see ``weyl_elements``)."""
    _check_cap(datum, cap)
    return _cached_table(datum, cap)


def longest_element(datum: RootDatum) -> WeylElement:
    """w0, found by descent without enumerating W."""
    return WeylElement(word=datum.w0_word, action=datum.w0_action)


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

def _orbit_search(
    datum: RootDatum, mu: Coweight, bound: Optional[int] = None, cap: int = DEFAULT_ENUMERATION_CAP
) -> Optional[List[Coweight]]:
    """Closure of {μ} under simple reflections.

    When ``bound`` is given the search stops early (returning None) as soon as
    a point has a coordinate of absolute value above ``bound``.
    """
    seen = {mu.coords}
    frontier = [mu]
    while frontier:
        nxt = []
        for point in frontier:
            for i in range(1, datum.rank + 1):
                image = datum.reflect(i, point)
                if image.coords in seen:
                    continue
                if bound is not None and any(abs(c) > bound for c in image.coords):
                    return None
                seen.add(image.coords)
                nxt.append(image)
                if len(seen) > cap:
                    raise EnumerationCapError(
                        f"Orbit of {mu.coords!r} exceeds the enumeration cap {cap}"
                    )
        frontier = nxt
    return [Coweight(c) for c in sorted(seen)]


def weyl_orbit(
    datum: RootDatum, mu: Coweight, cap: int = DEFAULT_ENUMERATION_CAP
) -> List[Coweight]:
    """The orbit W·μ∨, deduplicated and sorted lexicographically."""
    datum.check_coweight(mu)
    orbit = _orbit_search(datum, mu, cap=cap)
    assert orbit is not None
    return orbit


def dominant_representative(datum: RootDatum, mu: Coweight) -> Tuple[Coweight, int]:
    """Dominant point of W·μ and the parity of reflections used to reach it.

    Returns:
        ``(dominant, count)`` where ``count`` is the number of simple
        reflections applied. For regular μ, ``(-1) ** count`` is the sign
        of the unique w with μ ∈ w·C.
    """
    datum.check_coweight(mu)
    count = 0
    point = mu
    while True:
        negative = [k for k, c in enumerate(point.coords) if c < 0]
        if not negative:
            return point, count
        point = datum.reflect(negative[0] + 1, point)
        count += 1


# ---------------------------------------------------------------------------
# Minuscule coweights
# ---------------------------------------------------------------------------

def is_minuscule(datum: RootDatum, mu: Coweight) -> bool:
    """Dominant, nonzero, and ⟨α, w μ∨⟩ ∈ {−1, 0, 1} on the whole orbit."""
    datum.check_coweight(mu)
    if mu.is_zero() or not mu.is_dominant():
        return False
    if any(c > 1 for c in mu.coords):
        return False
    highest = datum.highest_root()
    # Orbit coordinates are only simple-root pairings; the highest-root
    # pairing bounds all positive roots on the dominant point.
    if sum(h * c for h, c in zip(highest, mu.coords)) > 1:
        return False
    return _orbit_search(datum, mu, bound=1) is not None


def minuscule_coweights(datum: RootDatum) -> List[Coweight]:
    """All minuscule coweights, in node order (always fundamental coweights)."""
    found = [
        datum.fundamental_coweight(k)
        for k in range(1, datum.rank + 1)
        if is_minuscule(datum, datum.fundamental_coweight(k))
    ]
    logger.debug("Minuscule coweights of %s: %s", datum.type_label, [m.coords for m in found])
    return found


def minuscule_coweight(datum: RootDatum, index: int) -> Coweight:
    """The fundamental coweight ω_index∨, checked to be minuscule.

    Raises:
        ConfigurationError: If ω_index∨ is not minuscule in this datum.
    """
    candidate = datum.fundamental_coweight(index)
    if not is_minuscule(datum, candidate):
        options = [k + 1 for k in range(datum.rank) if is_minuscule(datum, datum.fundamental_coweight(k + 1))]
        raise ConfigurationError(
            f"ω_{index}∨ is not minuscule in {datum.type_label}; choose one of {options!r}"
        )
    return candidate


# ---------------------------------------------------------------------------
# Inversion sets
# ---------------------------------------------------------------------------

def inversion_set(datum: RootDatum, element: WeylElement) -> List[Tuple[int, ...]]:
    """Inv(v) = Φ⁺ ∩ v Φ⁻: positive roots β with v⁻¹β negative.

    The cardinality equals ℓ(v).
    """
    inverse_word = tuple(reversed(element.word))
    return [
        root
        for root in datum.positive_roots
        if any(c < 0 for c in datum.act_on_root(inverse_word, root))
    ]


def weyl_vector_defect(datum: RootDatum, element: WeylElement) -> Tuple[Fraction, ...]:
    """ρ − vρ in simple-root coordinates; equals the sum of Inv(v)."""
    image = datum.act_on_root(element.word, datum.rho_pairings)
    return tuple(Fraction(r) - Fraction(v) for r, v in zip(datum.rho_pairings, image))
