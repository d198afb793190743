"""
report.py — JSON / CSV / table rendering of command results

Every command produces a ``Report``: a list of ``ResultRow`` plus a free-form
``summary`` mapping. Rendering is deterministic; the only field that varies
between identical runs is ``timestamp``.

JSON schema (version 1)::

    {
      "schema_version": 1,
      "command": "survival",
      "timestamp": "2026-10-16T12:00:00+00:00",
      "config": {...RunConfig fields...},
      "summary": {...},
      "rows": [{"lambda_coords": [0, 1], "value": 0.63, "route": "dp",
                "delta": 1e-13, "sigma": null}, ...]
    }

CSV columns: lambda_coords, value, route, delta, sigma.

Floats are written with 12 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

from src.errors import ConfigurationError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_COLUMNS = ("lambda_coords", "value", "route", "delta", "sigma")


def fmt_float(x: float) -> str:
    return "%.12g" % x


def _rounded(value: Any) -> Any:
    """Round every float to 12 significant digits, recursively."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return float(fmt_float(value))
    if isinstance(value, complex):
        return {"re": float(fmt_float(value.real)), "im": float(fmt_float(value.imag))}
    if isinstance(value, dict):
        return {str(k): _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    if hasattr(value, "item"):
        return _rounded(value.item())
    return value


@dataclass(frozen=True)
class ResultRow:
    """One line of a result table.

    Attributes:
        lambda_coords: The coweight the value belongs to.
        value:         Main value (``None`` when not applicable).
        route:         How the value was obtained.
        delta:         Deviation from the reference value, if any.
        sigma:         Deviation in standard errors (Monte-Carlo rows).
    """
    lambda_coords: Sequence[int]
    value: Optional[float]
    route: str
    delta: Optional[float] = None
    sigma: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "lambda_coords": [int(c) for c in self.lambda_coords],
            "value": self.value,
            "route": self.route,
            "delta": self.delta,
            "sigma": self.sigma,
        }


@dataclass
class Report:
    """Result of one sub-command."""
    command: str
    config: Dict[str, Any]
    rows: List[ResultRow] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def add(self, row: ResultRow) -> None:
        self.rows.append(row)

    # -- Renderers ----------------------------------------------------------

    def to_json(self) -> str:
        document = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "timestamp": self.timestamp,
            "config": _rounded(self.config),
            "summary": _rounded(self.summary),
            "rows": [_rounded(r.as_dict()) for r in self.rows],
        }
        return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow([
                " ".join(str(int(c)) for c in row.lambda_coords),
                "" if row.value is None else fmt_float(row.value),
                row.route,
                "" if row.delta is None else fmt_float(row.delta),
                "" if row.sigma is None else fmt_float(row.sigma),
            ])
        return buffer.getvalue()

    def to_table(self) -> str:
        lines = ["", "=" * 72, f"✅  RESULT  ➜  {self.command.upper()}", "-" * 72]
        for key, value in self.summary.items():
            lines.append(f"  {key:22s}: {_display(value)}")
        if self.rows:
            if self.summary:
                lines.append("-" * 72)
            lines.append(f"  {'λ∨':16s} {'route':14s} {'value':>18s} {'delta':>12s} {'σ':>8s}")
            for row in self.rows:
                lines.append(
                    f"  {str(tuple(row.lambda_coords)):16s} {row.route:14s} "
                    f"{_display(row.value):>18s} {_display(row.delta):>12s} {_display(row.sigma):>8s}"
                )
        lines.append("=" * 72)
        return "\n".join(lines) + "\n"

    def render(self, output_format: str) -> str:
        if output_format == "json":
            return self.to_json()
        if output_format == "csv":
            return self.to_csv()
        if output_format == "table":
            return self.to_table()
        raise ConfigurationError(f"Unknown output format {output_format!r}")


def _display(value: Any) -> str:
    if value is None:
        return "—"
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, complex):
        return f"{fmt_float(value.real)}{value.imag:+.3g}i"
    return str(value)
