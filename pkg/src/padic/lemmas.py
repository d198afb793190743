"""
lemmas.py — Exact checks of the Haar-measure lemmas on F_p((T))

All quantities here are computed by full enumeration of the relevant
base-p digits, so they are exact (TV distances as Fractions) or exact up
to the rounding of p-th roots of unity.

  • averaging_expectation_exact : E[ψ(xU)] = 1{x ∈ O}
  • min_plus_law_distance       : T^a U + T^b U′ has the law of T^min(a,b) U
  • haar_translation_distance   : U + y has the law of U for y ∈ O

Usage:
    from src.padic.lemmas import averaging_expectation_exact
    averaging_expectation_exact(LaurentSeries.monomial(3, -1))   # ≈ 0
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List

import numpy as np

from src.errors import ConfigurationError, EnumerationCapError
from src.padic.laurent import EXHAUSTED, LaurentSeries, check_prime

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_BOUND = 1_000_000


def _all_digit_tuples(p: int, m: int, bound: int) -> np.ndarray:
    """Every element of F_p^m as rows of an integer array."""
    count = p ** m
    if count > bound:
        raise EnumerationCapError(f"Enumerating {p}^{m} = {count} digit tuples exceeds bound {bound}")
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((p,) * m, dtype=np.int64)
    return grids.reshape(m, -1).T


def _encode(rows: np.ndarray, p: int) -> np.ndarray:
    """Base-p index of each row (first column least significant)."""
    weights = p ** np.arange(rows.shape[1], dtype=np.int64)
    return rows @ weights


def _total_variation(counts: np.ndarray, total: int, support: int) -> Fraction:
    """TV distance between an empirical count vector and the uniform law."""
    uniform = Fraction(1, support)
    return sum((abs(Fraction(int(c), total) - uniform) for c in counts), Fraction(0)) / 2


# ---------------------------------------------------------------------------
# Averaging roots of unity
# ---------------------------------------------------------------------------

def averaging_expectation_exact(
    x: LaurentSeries, twist: int = 1, bound: int = DEFAULT_ENUMERATION_BOUND
) -> complex:
    """Exact E[ψ(xU)] for U Haar on O.

    Only the digits u_0 … u_{m−1} of U, m = −val(x), reach the T⁻¹
    coefficient of xU, so the expectation is a finite average.

    Raises:
        PrecisionError: If the digits of x up to T⁻¹ are not tracked.
        EnumerationCapError: If p^m exceeds ``bound``.
    """
    v = x.valuation()
    if v is EXHAUSTED or v >= 0:
        # x ∈ O; is_integral raises when the window cannot decide it.
        x.is_integral()
        return complex(1.0, 0.0)

    m = -v
    p = x.p
    coeffs = np.asarray([x.digit(-1 - k) for k in range(m)], dtype=np.int64)
    tuples = _all_digit_tuples(p, m, bound)
    residues = (twist * (tuples @ coeffs)) % p
    counts = np.bincount(residues, minlength=p)
    roots = np.exp(2j * np.pi * np.arange(p) / p)
    value = complex(np.dot(counts, roots) / len(tuples))
    logger.debug("E[ψ(xU)]  p=%d  val=%d  value=%r", p, v, value)
    return value


# ---------------------------------------------------------------------------
# min-plus ("tropical") law of sums of shifted Haar elements
# ---------------------------------------------------------------------------

def min_plus_law_distance(
    a: int, b: int, p: int, high: int, bound: int = DEFAULT_ENUMERATION_BOUND
) -> Fraction:
    """Exact TV distance between T^a U + T^b U′ and T^min(a,b) U.

    Both laws are compared on the digits at exponents min(a,b) … high−1.

    Raises:
        ConfigurationError: If the window is empty.
        EnumerationCapError: If the joint digit space exceeds ``bound``.
    """
    check_prime(p)
    base = min(a, b)
    if high <= base:
        raise ConfigurationError(f"Window [{base}, {high}) is empty")
    width = high - base
    len_a = max(high - a, 0)
    len_b = max(high - b, 0)

    tuples = _all_digit_tuples(p, len_a + len_b, bound)
    window = np.zeros((len(tuples), width), dtype=np.int64)
    window[:, a - base: a - base + len_a] += tuples[:, :len_a]
    window[:, b - base: b - base + len_b] += tuples[:, len_a:]
    window %= p

    counts = np.bincount(_encode(window, p), minlength=p ** width)
    distance = _total_variation(counts, len(tuples), p ** width)
    logger.debug("min-plus  a=%d  b=%d  p=%d  high=%d  TV=%s", a, b, p, high, distance)
    return distance


def haar_translation_distance(
    y: LaurentSeries, high: int, bound: int = DEFAULT_ENUMERATION_BOUND
) -> Fraction:
    """Exact TV distance between the digit laws of U + y and U on [0, high).

    Raises:
        ConfigurationError: If y is not in O.
    """
    if not y.is_integral():
        raise ConfigurationError(f"Translation {y!r} is not in the ring of integers")
    p = y.p
    shift = np.asarray([y.digit(k) for k in range(high)], dtype=np.int64)
    tuples = _all_digit_tuples(p, high, bound)
    moved = (tuples + shift) % p
    counts = np.bincount(_encode(moved, p), minlength=p ** high)
    return _total_variation(counts, len(tuples), p ** high)


def haar_valuation_probability(p: int, g: int) -> float:
    """P(val(U) = g) = (1 − 1/p) p^−g for U Haar on O."""
    return (1.0 - 1.0 / p) * float(p) ** (-g)


# ---------------------------------------------------------------------------
# Table for the padic-verify command
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LemmaCheck:
    """One row of the p-adic verification table.

    Attributes:
        lemma:  ``"averaging"``, ``"min-plus"`` or ``"translation"``.
        params: Parameters that identify the case.
        value:  Measured deviation (|E − indicator| or TV distance).
        passed: Whether ``value`` is within tolerance.
    """
    lemma: str
    params: Dict[str, object] = field(default_factory=dict)
    value: float = 0.0
    passed: bool = True


def verify_padic_lemmas(
    p: int,
    precision: int = 4,
    bound: int = DEFAULT_ENUMERATION_BOUND,
    tolerance: float = 1e-12,
) -> List[LemmaCheck]:
    """Run the exact lemma checks for one prime.

    Args:
        p:         Prime residue characteristic.
        precision: Window width for the min-plus and translation checks, and
                   the largest |val(x)| for the averaging check.
        bound:     Enumeration bound for every check.
        tolerance: Allowed deviation for the averaging check.
    """
    check_prime(p)
    rows: List[LemmaCheck] = []

    for v in range(-precision, 1):
        for twist in sorted({1, p - 1}):
            x = LaurentSeries.polynomial(p, v, [(k + 1) % p or 1 for k in range(1 - v)])
            value = averaging_expectation_exact(x, twist=twist, bound=bound)
            deviation = abs(value - (1.0 if v >= 0 else 0.0))
            rows.append(LemmaCheck("averaging", {"val": v, "twist": twist}, deviation, deviation < tolerance))

    shifts = range(0, min(3, precision))
    for a in shifts:
        for b in shifts:
            distance = min_plus_law_distance(a, b, p, precision, bound)
            rows.append(LemmaCheck("min-plus", {"a": a, "b": b, "high": precision}, float(distance), distance == 0))

    y = LaurentSeries.polynomial(p, 0, [k % p for k in range(1, precision + 1)])
    distance = haar_translation_distance(y, precision, bound)
    rows.append(LemmaCheck("translation", {"high": precision}, float(distance), distance == 0))

    failed = sum(1 for r in rows if not r.passed)
    logger.info("p-adic lemmas  p=%d  checks=%d  failed=%d", p, len(rows), failed)
    return rows
