"""
laurent.py — Truncated formal Laurent series over F_p

Models the local field K = F_p((T)) at finite precision. A value is
known modulo T^high: the digits at exponents low … high−1 are tracked,
everything below ``low`` is zero and everything from ``high`` on is
unknown. Reading an unknown digit raises ``PrecisionError``; it is never
silently zero.

Exact elements (polynomials in T and T⁻¹) carry the horizon
``EXACT_HORIZON`` and only store their nonzero span.

Usage:
    from src.padic.laurent import LaurentSeries, sample_haar_O
    x = LaurentSeries.from_digits(3, 0, [1, 2])        # 1 + 2T  (mod T²)
    y = LaurentSeries.polynomial(3, 0, [2, 1])         # 2 + T, exact
    (x * y).digits                                     # (2, 2)
"""

from __future__ import annotations

import cmath
import enum
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from src.errors import ConfigurationError, PrecisionError

logger = logging.getLogger(__name__)

EXACT_HORIZON = 1 << 40


class Valuation(enum.Enum):
    """Marker returned by ``valuation`` when every tracked digit vanishes."""
    EXHAUSTED = "indistinguishable-from-zero"


EXHAUSTED = Valuation.EXHAUSTED


@lru_cache(maxsize=64)
def check_prime(p: int) -> int:
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ConfigurationError(f"Residue characteristic must be prime, got {p!r}")
    return p


def _clamp(h: int) -> int:
    return min(h, EXACT_HORIZON)


# ---------------------------------------------------------------------------
# Data contract
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LaurentSeries:
    """Element of F_p((T)) known modulo T^high.

    Attributes:
        p:      Prime residue characteristic.
        low:    Exponent of ``digits[0]``; all lower digits are zero.
        digits: Residues mod p for exponents ``low … low+len(digits)−1``;
                digits from there up to ``high`` are zero.
        high:   Precision horizon (exclusive).
    """
    p: int
    low: int
    digits: Tuple[int, ...]
    high: int

    def __post_init__(self) -> None:
        if self.high - self.low < len(self.digits):
            raise PrecisionError(
                f"{len(self.digits)} digits do not fit the window [{self.low}, {self.high})"
            )

    # -- Constructors -------------------------------------------------------

    @classmethod
    def from_digits(
        cls, p: int, low: int, digits: Iterable[int], high: Optional[int] = None
    ) -> "LaurentSeries":
        """Series with explicit digits; ``high`` defaults to the end of the digits."""
        check_prime(p)
        values = tuple(int(d) % p for d in digits)
        top = low + len(values) if high is None else _clamp(high)
        if top < low:
            top = low
        return cls(p, low, values[: max(top - low, 0)], top)

    @classmethod
    def polynomial(cls, p: int, low: int, digits: Iterable[int]) -> "LaurentSeries":
        """Exact element Σ digits[k] T^{low+k}."""
        return cls.from_digits(p, low, digits, EXACT_HORIZON)._trimmed()

    @classmethod
    def zero(cls, p: int, high: int = EXACT_HORIZON) -> "LaurentSeries":
        """Zero known modulo T^high (exact by default)."""
        check_prime(p)
        h = _clamp(high)
        return cls(p, h if h < EXACT_HORIZON else 0, (), h)

    @classmethod
    def one(cls, p: int) -> "LaurentSeries":
        return cls.polynomial(p, 0, [1])

    @classmethod
    def monomial(cls, p: int, exponent: int, coeff: int = 1) -> "LaurentSeries":
        return cls.polynomial(p, exponent, [coeff])

    # -- Basic properties ---------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.high >= EXACT_HORIZON

    @property
    def width(self) -> int:
        """Number of tracked exponents (``high − low``)."""
        return self.high - self.low

    def digit(self, k: int) -> int:
        """Coefficient of T^k.

        Raises:
            PrecisionError: If ``k`` lies at or beyond the horizon.
        """
        if k >= self.high:
            raise PrecisionError(f"Digit T^{k} is beyond the precision horizon {self.high}")
        offset = k - self.low
        if offset < 0 or offset >= len(self.digits):
            return 0
        return self.digits[offset]

    def valuation(self) -> Union[int, Valuation]:
        """Exponent of the first nonzero tracked digit, or ``EXHAUSTED``."""
        for offset, d in enumerate(self.digits):
            if d:
                return self.low + offset
        return EXHAUSTED

    def is_integral(self) -> bool:
        """Membership in O = F_p[[T]].

        Raises:
            PrecisionError: If the negative exponents are not all tracked.
        """
        v = self.valuation()
        if v is not EXHAUSTED:
            return v >= 0
        if self.high < 0:
            raise PrecisionError(f"Cannot decide integrality below horizon {self.high}")
        return True

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """Digit equality on the common precision window."""
        self._check_field(other)
        top = min(self.high, other.high)
        bottom = min(self.low, other.low)
        top = min(top, max(self.low + len(self.digits), other.low + len(other.digits), bottom))
        return all(self.digit(k) == other.digit(k) for k in range(bottom, top))

    # -- Arithmetic ---------------------------------------------------------

    def _check_field(self, other: "LaurentSeries") -> None:
        if self.p != other.p:
            raise PrecisionError(f"Mismatched residue fields p={self.p!r} and p={other.p!r}")

    def _trimmed(self) -> "LaurentSeries":
        """Drop zero digits at both ends of the stored span (value unchanged)."""
        digits = self.digits
        start = 0
        while start < len(digits) and digits[start] == 0:
            start += 1
        end = len(digits)
        while end > start and digits[end - 1] == 0:
            end -= 1
        if start == end:
            low = self.high if not self.is_exact else 0
            return LaurentSeries(self.p, min(low, self.high), (), self.high)
        return LaurentSeries(self.p, self.low + start, digits[start:end], self.high)

    def _dense(self, low: int, high: int) -> np.ndarray:
        out = np.zeros(max(high - low, 0), dtype=np.int64)
        for offset, d in enumerate(self.digits):
            k = self.low + offset - low
            if 0 <= k < len(out):
                out[k] = d
        return out

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_field(other)
        high = min(self.high, other.high)
        low = min(self.low, other.low, high)
        span_end = min(high, max(self.low + len(self.digits), other.low + len(other.digits), low))
        digits = (self._dense(low, span_end) + other._dense(low, span_end)) % self.p
        return LaurentSeries(self.p, low, tuple(int(d) for d in digits), high)._trimmed()

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.p, self.low, tuple((-d) % self.p for d in self.digits), self.high)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_field(other)
        low = self.low + other.low
        high = _clamp(min(self.low + other.high, other.low + self.high))
        if (self.is_exact and not self.digits) or (other.is_exact and not other.digits):
            return LaurentSeries.zero(self.p)
        if not self.digits or not other.digits:
            return LaurentSeries.zero(self.p, high)
        product = np.convolve(np.asarray(self.digits, dtype=np.int64),
                              np.asarray(other.digits, dtype=np.int64)) % self.p
        keep = max(min(len(product), high - low), 0)
        return LaurentSeries(self.p, low, tuple(int(d) for d in product[:keep]), high)._trimmed()

    def scale(self, c: int) -> "LaurentSeries":
        """Multiply by the constant c ∈ F_p."""
        c %= self.p
        if c == 0:
            return LaurentSeries.zero(self.p, self.high)
        return LaurentSeries(self.p, self.low, tuple(d * c % self.p for d in self.digits), self.high)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by T^k."""
        high = self.high if self.is_exact else self.high + k
        return LaurentSeries(self.p, self.low + k, self.digits, _clamp(high))

    def truncate(self, high: int) -> "LaurentSeries":
        """Forget every digit from ``high`` on."""
        high = min(high, self.high)
        low = min(self.low, high)
        keep = max(high - self.low, 0)
        return LaurentSeries(self.p, low, self.digits[:keep], high)._trimmed()

    def inverse(self, precision: Optional[int] = None) -> "LaurentSeries":
        """Multiplicative inverse.

        For a series known modulo T^high with valuation v the inverse is
        known to the same relative precision ``high − v``. Exact inputs
        need an explicit relative ``precision``.

        Raises:
            PrecisionError: If the valuation is not determined.
        """
        v = self.valuation()
        if v is EXHAUSTED:
            raise PrecisionError("Cannot invert a series indistinguishable from zero")
        trimmed = self._trimmed()
        if self.is_exact and len(trimmed.digits) == 1:
            return LaurentSeries.monomial(self.p, -v, pow(trimmed.digits[0], -1, self.p))
        relative = (self.high - v) if not self.is_exact else precision
        if relative is None:
            raise PrecisionError("Inverting an exact series needs a relative precision")
        if precision is not None:
            relative = min(relative, precision)
        unit = [self.digit(v + k) if v + k < self.high else 0 for k in range(relative)]
        inv0 = pow(unit[0], -1, self.p)
        out = [inv0]
        for k in range(1, relative):
            acc = sum(unit[j] * out[k - j] for j in range(1, min(k, len(unit) - 1) + 1))
            out.append((-acc * inv0) % self.p)
        return LaurentSeries(self.p, -v, tuple(out), -v + relative)._trimmed()

    def __repr__(self) -> str:
        horizon = "exact" if self.is_exact else f"O(T^{self.high})"
        return f"LaurentSeries(p={self.p}, low={self.low}, digits={list(self.digits)}, {horizon})"


def add(x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    return x + y


def mul(x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    return x * y


def neg(x: LaurentSeries) -> LaurentSeries:
    return -x


def valuation(x: LaurentSeries) -> Union[int, Valuation]:
    return x.valuation()


# ---------------------------------------------------------------------------
# Haar sampling on O
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class HaarSample:
    """Haar-distributed element of O, known modulo T^high.

    Attributes:
        series: The sampled series (``low = 0``).
    """
    series: LaurentSeries


def sample_haar_O(p: int, high: int, rng: np.random.Generator) -> HaarSample:
    """Uniform i.i.d. digits at exponents 0 … high−1.

    Raises:
        ConfigurationError: If ``high < 1``.
    """
    check_prime(p)
    if high < 1:
        raise ConfigurationError(f"Haar sample needs high ≥ 1, got {high!r}")
    digits = rng.integers(0, p, size=high)
    return HaarSample(LaurentSeries(p, 0, tuple(int(d) for d in digits), high))


def sample_haar_unit(p: int, high: int, rng: np.random.Generator) -> LaurentSeries:
    """Haar-distributed unit of O: leading digit uniform on F_p^*."""
    check_prime(p)
    lead = int(rng.integers(1, p))
    rest = rng.integers(0, p, size=max(high - 1, 0))
    return LaurentSeries(p, 0, (lead,) + tuple(int(d) for d in rest), max(high, 1))


# ---------------------------------------------------------------------------
# Additive character
# ---------------------------------------------------------------------------

def additive_character(x: LaurentSeries, twist: int = 1) -> complex:
    """ψ(x) = exp(2πi · twist · a₋₁ / p), trivial on O, nontrivial on T⁻¹O.

    Args:
        x:     Element of K.
        twist: Unit of F_p; ``twist ≠ 1`` gives another admissible ψ.

    Raises:
        PrecisionError: If x has negative exponents but T⁻¹ is not tracked.
        ConfigurationError: If ``twist`` is not a unit mod p.
    """
    if twist % x.p == 0:
        raise ConfigurationError(f"Character twist {twist!r} is not a unit mod {x.p}")
    if x.low >= 0 or not x.digits:
        if x.high <= -1 and x.low < 0:
            raise PrecisionError("Coefficient of T^-1 is beyond the precision horizon")
        return complex(1.0, 0.0)
    a = x.digit(-1)
    if a == 0:
        return complex(1.0, 0.0)
    return cmath.exp(2j * cmath.pi * (twist * a % x.p) / x.p)
