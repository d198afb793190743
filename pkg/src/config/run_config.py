"""
run_config.py — Run configuration for every sub-command

Values are resolved with increasing precedence:

    dataclass defaults  <  JSON file (--config)  <  explicit command-line flags

Command-line parsers use ``None`` defaults, so only the flags a user actually
typed override the file.

Usage:
    from src.config.run_config import RunConfig
    cfg = RunConfig.load("run.json").merged({"seed": 11})
    datum = cfg.datum()
    z = cfg.spectral_point(datum)
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, ClassVar, Dict, Mapping, Optional, Tuple

from src.errors import ConfigurationError
from src.roots.root_system import Coweight, RootDatum, build_root_datum
from src.roots.weyl import minuscule_coweight
from src.spectral.characters import SpectralPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Immutable parameters of one run.

    Attributes:
        type_label:      Cartan type letter (A, B, C, D, E).
        rank:            Rank of the root datum.
        z:               Spectral point coordinates, see ``z_basis``.
        z_basis:         ``"omega"`` (values are ⟨z, ω_j∨⟩) or ``"coroot"``
                         (values are ⟨z, α_i∨⟩).
        q:               Residue field size for Hecke and Whittaker values.
        p:               Prime of F_p((T)) for the p-adic simulations.
        lambda_coords:   λ∨ in ω∨ coordinates; ``None`` means 0.
        minuscule_index: k with Λ∨ = ω_k∨.
        horizon:         Walk horizon T.
        samples:         Monte-Carlo replicates.
        seed:            Root seed of every random stream.
        precision:       Laurent-series horizon (digits below T^precision).
        output_format:   ``json``, ``csv`` or ``table``.
        route:           Survival route: ``reflection``, ``dp``, ``mc`` or ``all``.
        threads:         Worker threads (never changes numeric output).
        step_cap:        Stabilization step cap.
        enumeration_cap: Largest Weyl group / digit enumeration allowed.
        state_cap:       Largest DP box allowed.
        wall_tolerance:  Minimum ⟨z, α_i∨⟩ accepted.
        tolerance_scale: Multiplier for every acceptance tolerance.
        b_coords:        Coweight of the start element ϖ^{−b} (harmonicity).
        grid_max:        Largest k on the Whittaker table ray k·(1, …, 1).
    """

    DEFAULT_TYPE: ClassVar[str] = "A"
    DEFAULT_RANK: ClassVar[int] = 1
    DEFAULT_Z: ClassVar[Tuple[float, ...]] = (0.5,)
    DEFAULT_Q: ClassVar[int] = 3
    DEFAULT_P: ClassVar[int] = 3
    DEFAULT_HORIZON: ClassVar[int] = 400
    DEFAULT_SAMPLES: ClassVar[int] = 10_000
    DEFAULT_SEED: ClassVar[int] = 20_240_917
    DEFAULT_PRECISION: ClassVar[int] = 8
    DEFAULT_STEP_CAP: ClassVar[int] = 100_000
    DEFAULT_ENUMERATION_CAP: ClassVar[int] = 1_000_000
    DEFAULT_STATE_CAP: ClassVar[int] = 10_000_000
    DEFAULT_WALL_TOLERANCE: ClassVar[float] = 1e-6
    DEFAULT_GRID_MAX: ClassVar[int] = 40

    Z_BASES = ("omega", "coroot")
    OUTPUT_FORMATS = ("json", "csv", "table")
    ROUTES = ("reflection", "dp", "mc", "all")

    type_label: str = DEFAULT_TYPE
    rank: int = DEFAULT_RANK
    z: Tuple[float, ...] = DEFAULT_Z
    z_basis: str = "omega"
    q: int = DEFAULT_Q
    p: int = DEFAULT_P
    lambda_coords: Optional[Tuple[int, ...]] = None
    minuscule_index: int = 1
    horizon: int = DEFAULT_HORIZON
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    precision: int = DEFAULT_PRECISION
    output_format: str = "table"
    route: str = "all"
    threads: int = 1
    step_cap: int = DEFAULT_STEP_CAP
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    state_cap: int = DEFAULT_STATE_CAP
    wall_tolerance: float = DEFAULT_WALL_TOLERANCE
    tolerance_scale: float = 1.0
    b_coords: Optional[Tuple[int, ...]] = None
    grid_max: int = DEFAULT_GRID_MAX

    # -- Construction -------------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys {unknown!r}")
        values: Dict[str, Any] = {}
        for key, value in data.items():
            if key in ("z", "lambda_coords", "b_coords") and value is not None:
                value = tuple(value)
            values[key] = value
        return cls(**values)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Malformed configuration JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(f"Configuration must be a JSON object, got {type(data).__name__!r}")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        file = Path(path)
        if not file.is_file():
            raise ConfigurationError(f"Configuration file not found: {path!r}")
        logger.info("Loading configuration from %s", file)
        return cls.from_json(file.read_text(encoding="utf-8"))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key in ("z", "lambda_coords", "b_coords"):
            if data[key] is not None:
                data[key] = list(data[key])
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def merged(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Apply every override whose value is not ``None``."""
        explicit = {k: v for k, v in overrides.items() if v is not None}
        if not explicit:
            return self
        return RunConfig.from_dict({**self.to_dict(), **explicit})

    # -- Validation ---------------------------------------------------------

    def validate(self) -> "RunConfig":
        """Check ranges and shapes.

        Raises:
            ConfigurationError: On the first invalid field.
        """
        if self.z_basis not in self.Z_BASES:
            raise ConfigurationError(f"z_basis must be one of {self.Z_BASES!r}, got {self.z_basis!r}")
        if self.output_format not in self.OUTPUT_FORMATS:
            raise ConfigurationError(
                f"output_format must be one of {self.OUTPUT_FORMATS!r}, got {self.output_format!r}"
            )
        if self.route not in self.ROUTES:
            raise ConfigurationError(f"route must be one of {self.ROUTES!r}, got {self.route!r}")
        datum = self.datum()
        if len(self.z) != datum.rank:
            raise ConfigurationError(f"z has {len(self.z)} coordinates, {datum.type_label} needs {datum.rank}")
        for name in ("lambda_coords", "b_coords"):
            value = getattr(self, name)
            if value is not None and len(value) != datum.rank:
                raise ConfigurationError(f"{name} = {value!r} does not have {datum.rank} coordinates")
        for name in ("horizon", "grid_max"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be ≥ 0, got {getattr(self, name)!r}")
        for name in ("samples", "threads", "step_cap", "enumeration_cap", "state_cap", "precision"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be ≥ 1, got {getattr(self, name)!r}")
        if self.q < 2:
            raise ConfigurationError(f"q must be ≥ 2, got {self.q!r}")
        if self.wall_tolerance < 0 or self.tolerance_scale <= 0:
            raise ConfigurationError("wall_tolerance must be ≥ 0 and tolerance_scale > 0")
        self.minuscule()
        return self

    # -- Derived objects ----------------------------------------------------

    def datum(self) -> RootDatum:
        return build_root_datum(self.type_label, self.rank)

    @property
    def matrix_size(self) -> int:
        """n of PGL_n; only meaningful for type A."""
        if self.type_label.upper() != "A":
            raise ConfigurationError(f"Matrix simulations need type A, got {self.type_label!r}")
        return self.rank + 1

    def spectral_point(self, datum: Optional[RootDatum] = None) -> SpectralPoint:
        datum = datum or self.datum()
        if self.z_basis == "coroot":
            return SpectralPoint.from_coroot_pairings(datum, self.z)
        return SpectralPoint.of(self.z)

    def lam(self) -> Coweight:
        return Coweight.of(self.lambda_coords if self.lambda_coords is not None else (0,) * self.rank)

    def b(self) -> Coweight:
        return Coweight.of(self.b_coords if self.b_coords is not None else (0,) * self.rank)

    def minuscule(self) -> Coweight:
        return minuscule_coweight(self.datum(), self.minuscule_index)
