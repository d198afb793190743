"""
unipotent.py — Type-A Borel group over F_p((T))

Realises the lower Borel subgroup of PGL_n with truncated Laurent-series
entries:

  • Unitriangular    — lower unitriangular n×n matrices (the group N).
  • LowerTriangular  — general lower-triangular matrices, with the NA
                       decomposition modulo T(O).
  • BorelElement     — a pair (n, μ∨) standing for n · ϖ^{−μ∨}.

A coweight μ∨ of PGL_n in ω∨ coordinates corresponds to the exponent
vector e_k = Σ_{i≥k} μ_i (so e_n = 0), and ϖ^{−μ∨} = diag(T^{−e_1}, …, T^{−e_n}).
Conjugation ϖ^{−μ∨} n ϖ^{μ∨} multiplies entry (j, i) by T^{e_i − e_j}; on
the subdiagonal that is T^{⟨α_i, μ∨⟩}.

Usage:
    from src.borel.unipotent import Unitriangular, chi_alpha_minus
    x = Unitriangular.elementary(3, p=3, i=1, value=LaurentSeries.one(3))
    chi_alpha_minus(x)      # [1, 0]
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ConfigurationError, PrecisionError
from src.padic.laurent import (
    EXHAUSTED,
    LaurentSeries,
    additive_character,
    check_prime,
    sample_haar_unit,
)
from src.roots.root_system import Coweight

logger = logging.getLogger(__name__)

Entry = Tuple[int, int]


def exponent_vector(mu: Coweight) -> Tuple[int, ...]:
    """e_k = Σ_{i≥k} μ_i for k = 1 … n, with e_n = 0."""
    out = [0]
    for c in reversed(mu.coords):
        out.append(out[-1] + c)
    return tuple(reversed(out))


def entry_order(n: int) -> List[Entry]:
    """Strictly-lower entries (j, i), 0-based, subdiagonal first then by depth."""
    return [(i + d, i) for d in range(1, n) for i in range(n - d)]


def entry_shifts(n: int, mu: Coweight) -> Dict[Entry, int]:
    """Exponent shift e_i − e_j that conjugation by ϖ^{−μ∨} puts on entry (j, i)."""
    e = exponent_vector(mu)
    return {(j, i): e[i] - e[j] for j, i in entry_order(n)}


# ---------------------------------------------------------------------------
# N — lower unitriangular matrices
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Unitriangular:
    """Lower unitriangular matrix with Laurent-series entries.

    Attributes:
        n:       Matrix size.
        p:       Residue characteristic.
        entries: Strictly-lower entries keyed by 0-based (row, column);
                 missing keys are exact zeros.
    """
    n: int
    p: int
    entries: Dict[Entry, LaurentSeries]

    @classmethod
    def identity(cls, n: int, p: int) -> "Unitriangular":
        check_prime(p)
        return cls(n, p, {})

    @classmethod
    def elementary(cls, n: int, p: int, i: int, value: LaurentSeries) -> "Unitriangular":
        """x_{−α_i}(value): ``value`` at entry (i+1, i), 1-based node i."""
        if not 1 <= i < n:
            raise ConfigurationError(f"Simple root index {i!r} out of range for PGL_{n}")
        return cls(n, p, {(i, i - 1): value})

    def entry(self, j: int, i: int) -> LaurentSeries:
        return self.entries.get((j, i), LaurentSeries.zero(self.p))

    def __mul__(self, other: "Unitriangular") -> "Unitriangular":
        if (self.n, self.p) != (other.n, other.p):
            raise ConfigurationError("Multiplying unitriangular matrices of different shapes or fields")
        out: Dict[Entry, LaurentSeries] = {}
        for j, i in entry_order(self.n):
            total = self.entry(j, i) + other.entry(j, i)
            for k in range(i + 1, j):
                if (j, k) in self.entries and (k, i) in other.entries:
                    total = total + self.entries[(j, k)] * other.entries[(k, i)]
            if total.digits or not total.is_exact:
                out[(j, i)] = total
        return Unitriangular(self.n, self.p, out)

    def conjugate(self, mu: Coweight) -> "Unitriangular":
        """ϖ^{−μ∨} · self · ϖ^{μ∨}."""
        shifts = entry_shifts(self.n, mu)
        return Unitriangular(
            self.n, self.p, {key: value.shift(shifts[key]) for key, value in self.entries.items()}
        )

    def truncate(self, high: int) -> "Unitriangular":
        return Unitriangular(self.n, self.p, {k: v.truncate(high) for k, v in self.entries.items()})

    def agrees_with(self, other: "Unitriangular", entries: Optional[Sequence[Entry]] = None) -> bool:
        keys = entries if entries is not None else entry_order(self.n)
        return all(self.entry(j, i).agrees_with(other.entry(j, i)) for j, i in keys)


def chi_alpha_minus(nu: Unitriangular) -> List[LaurentSeries]:
    """The n−1 subdiagonal entries χ_{α_i}^−(nu), i = 1 … n−1."""
    return [nu.entry(i + 1, i) for i in range(nu.n - 1)]


def phi_N(nu: Unitriangular, twist: int = 1) -> complex:
    """φ_N(nu) = Π_i ψ(χ_{α_i}^−(nu))."""
    value = complex(1.0, 0.0)
    for chi in chi_alpha_minus(nu):
        value *= additive_character(chi, twist)
    return value


def phi_N_conjugated(nu: Unitriangular, lam: Coweight, twist: int = 1) -> complex:
    """φ_N(ϖ^{−λ∨} nu ϖ^{λ∨}) = Π_i ψ(T^{⟨α_i,λ∨⟩} χ_{α_i}^−(nu)).

    Raises:
        PrecisionError: If a needed T⁻¹ coefficient is not tracked.
    """
    if lam.rank != nu.n - 1:
        raise ConfigurationError(f"λ∨ = {lam.coords!r} does not match PGL_{nu.n}")
    return phi_N(nu.conjugate(lam), twist)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_conjugated_unipotent(
    n: int, p: int, high: int, mu: Coweight, rng: np.random.Generator
) -> Unitriangular:
    """ϖ^{−μ∨} n ϖ^{μ∨} for n Haar on N(O), every entry known mod T^high.

    Entry (j, i) carries the shift s = e_i − e_j and gets max(high − s, 1)
    uniform digits starting at T^s. All entries are drawn as one block
    of width max(high − min s, 1), rows in ``entry_order``.
    """
    shifts = entry_shifts(n, mu)
    order = entry_order(n)
    width = max(high - min(shifts.values(), default=high), 1)
    block = rng.integers(0, p, size=(len(order), width))
    entries: Dict[Entry, LaurentSeries] = {}
    for row, key in enumerate(order):
        s = shifts[key]
        w = max(high - s, 1)
        entries[key] = LaurentSeries(p, s, tuple(int(d) for d in block[row, :w]), s + w)
    return Unitriangular(n, p, entries)


# ---------------------------------------------------------------------------
# B — lower-triangular matrices and the NA decomposition
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class LowerTriangular:
    """Lower-triangular n×n matrix over K (diagonal included).

    Attributes:
        n:       Matrix size.
        p:       Residue characteristic.
        entries: Entries (j, i) with j ≥ i; missing keys are exact zeros.
    """
    n: int
    p: int
    entries: Dict[Entry, LaurentSeries]

    def entry(self, j: int, i: int) -> LaurentSeries:
        return self.entries.get((j, i), LaurentSeries.zero(self.p))

    @classmethod
    def from_unitriangular(cls, nu: Unitriangular) -> "LowerTriangular":
        entries = dict(nu.entries)
        for k in range(nu.n):
            entries[(k, k)] = LaurentSeries.one(nu.p)
        return cls(nu.n, nu.p, entries)

    @classmethod
    def torus(cls, n: int, p: int, mu: Coweight) -> "LowerTriangular":
        """ϖ^{−μ∨} = diag(T^{−e_k})."""
        e = exponent_vector(mu)
        return cls(n, p, {(k, k): LaurentSeries.monomial(p, -e[k]) for k in range(n)})

    def __mul__(self, other: "LowerTriangular") -> "LowerTriangular":
        out: Dict[Entry, LaurentSeries] = {}
        for j in range(self.n):
            for i in range(j + 1):
                total: Optional[LaurentSeries] = None
                for k in range(i, j + 1):
                    if (j, k) in self.entries and (k, i) in other.entries:
                        term = self.entries[(j, k)] * other.entries[(k, i)]
                        total = term if total is None else total + term
                if total is not None:
                    out[(j, i)] = total
        return LowerTriangular(self.n, self.p, out)

    def na_decomposition(self) -> Tuple[Unitriangular, Coweight]:
        """Write self = n · ϖ^{−ν∨} mod T(O).

        The diagonal valuations v_k give ν_k = v_{k+1} − v_k, and
        n = self · diag(self)^{-1}.

        Raises:
            PrecisionError: If a diagonal valuation is not determined.
        """
        valuations = []
        inverses = []
        for k in range(self.n):
            d = self.entry(k, k)
            v = d.valuation()
            if v is EXHAUSTED:
                raise PrecisionError(f"Diagonal entry {k} is indistinguishable from zero")
            valuations.append(v)
            inverses.append(d.inverse())
        nu_entries = {
            (j, i): self.entries[(j, i)] * inverses[i]
            for j, i in entry_order(self.n)
            if (j, i) in self.entries
        }
        nu = Coweight(tuple(valuations[k + 1] - valuations[k] for k in range(self.n - 1)))
        return Unitriangular(self.n, self.p, nu_entries), nu


def sample_borel_haar(n: int, p: int, high: int, rng: np.random.Generator) -> LowerTriangular:
    """Haar element of B(O): unit diagonal entries, uniform O entries below."""
    check_prime(p)
    entries: Dict[Entry, LaurentSeries] = {}
    for k in range(n):
        entries[(k, k)] = sample_haar_unit(p, high, rng)
    for j, i in entry_order(n):
        digits = rng.integers(0, p, size=max(high, 1))
        entries[(j, i)] = LaurentSeries(p, 0, tuple(int(d) for d in digits), max(high, 1))
    return LowerTriangular(n, p, entries)


# ---------------------------------------------------------------------------
# BorelElement — n · ϖ^{−μ∨} modulo T(O)
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BorelElement:
    """Element n · ϖ^{−μ∨} of B(K)/T(O).

    Attributes:
        nu: N-part.
        mu: Coweight of the A-part (exponent vector normalised to e_n = 0).
    """
    nu: Unitriangular
    mu: Coweight

    @classmethod
    def identity(cls, n: int, p: int) -> "BorelElement":
        return cls(Unitriangular.identity(n, p), Coweight((0,) * (n - 1)))

    @classmethod
    def torus(cls, n: int, p: int, mu: Coweight) -> "BorelElement":
        """ϖ^{−μ∨} itself."""
        return cls(Unitriangular.identity(n, p), mu)

    @property
    def a_exponents(self) -> Tuple[int, ...]:
        return exponent_vector(self.mu)

    def __mul__(self, other: "BorelElement") -> "BorelElement":
        """(n, μ)(n′, μ′) = (n · ϖ^{−μ} n′ ϖ^{μ}, μ + μ′)."""
        return BorelElement(self.nu * other.nu.conjugate(self.mu), self.mu + other.mu)

    def matrix(self) -> LowerTriangular:
        return LowerTriangular.from_unitriangular(self.nu) * LowerTriangular.torus(
            self.nu.n, self.nu.p, self.mu
        )
