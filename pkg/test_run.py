"""
test_run.py — Scenario smoke script

Runs a handful of representative commands end to end through
``src.router.handler.dispatch`` and prints each report, so a change can be
eyeballed without the full pytest suite.

Two execution modes:
  • LATTICE MODE (default) — characters, survival routes, Whittaker table
    and the root datum document. Runs in seconds.
  • P-ADIC MODE — exact lemma enumeration plus small Poisson and
    harmonicity simulations on PGL_2 / PGL_3.

Run:
    python test_run.py              # lattice scenarios only
    python test_run.py --padic      # add the p-adic scenarios
"""

from __future__ import annotations

import logging
import sys
from typing import Any, Dict, List

# ---------------------------------------------------------------------------
# Logging
# ---------------------------------------------------------------------------
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s | %(name)-30s | %(levelname)-7s | %(message)s",
    datefmt="%H:%M:%S",
)
logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════════
# Scenarios
# ═══════════════════════════════════════════════════════════════════════════

LATTICE_SCENARIOS: List[Dict[str, Any]] = [
    {
        "name": "Scenario 1 — A1 closed form",
        "command": "survival",
        "config": {"lambda_coords": (2,), "z": (0.5,), "horizon": 200, "samples": 4000},
        "expected": "reflection ≈ 1 − e^{−3} ≈ 0.950213, dp and mc agree",
    },
    {
        "name": "Scenario 2 — A2 character via survival",
        "command": "character",
        "config": {"rank": 2, "z": (0.4, 0.4), "lambda_coords": (1, 0)},
        "expected": "weyl = survival = orbit-sum row, delta < 1e-10",
    },
    {
        "name": "Scenario 3 — C2 Whittaker ray",
        "command": "whittaker-table",
        "config": {"type_label": "C", "rank": 2, "z": (0.6, 0.5), "minuscule_index": 2, "grid_max": 6},
        "expected": "first row 0, delta shrinking along the ray",
    },
    {
        "name": "Scenario 4 — A3 datum",
        "command": "datum",
        "config": {"rank": 3, "z": (0.3, 0.3, 0.3), "minuscule_index": 2},
        "expected": "|W| = 24, minuscule (0, 1, 0), coset count = q^2 binomial",
    },
]

PADIC_SCENARIOS: List[Dict[str, Any]] = [
    {
        "name": "Scenario 5 — p-adic lemmas, p = 3",
        "command": "padic-verify",
        "config": {"p": 3, "precision": 3},
        "expected": "all checks pass",
    },
    {
        "name": "Scenario 6 — Poisson kernel on PGL_2",
        "command": "poisson",
        "config": {"z": (0.5,), "lambda_coords": (0,), "samples": 2000},
        "expected": "estimate within 4σ of 1 − e^{−1} ≈ 0.632121",
    },
    {
        "name": "Scenario 7 — Harmonicity on PGL_3",
        "command": "harmonicity",
        "config": {"rank": 2, "z": (0.5, 0.5), "samples": 1000, "precision": 6},
        "expected": "harmonic and alpha-harmonic rows within 4σ",
    },
]


def run_scenarios(scenarios: List[Dict[str, Any]]) -> int:
    """Run every scenario and return the number of failures."""
    from src.config.run_config import RunConfig
    from src.errors import ScsError
    from src.router.handler import dispatch

    failures = 0
    for scenario in scenarios:
        print("\n" + "─" * 60)
        print(f"  🧪  {scenario['name']}")
        print(f"  Command  : {scenario['command']}")
        print(f"  Expected : {scenario['expected']}")
        print("─" * 60)
        try:
            cfg = RunConfig().merged(scenario["config"]).validate()
            print(dispatch(scenario["command"], cfg).render("table"))
        except ScsError as exc:
            failures += 1
            print(f"  ⚠️  {type(exc).__name__}: {exc}")
    return failures


# ═══════════════════════════════════════════════════════════════════════════
# CLI
# ═══════════════════════════════════════════════════════════════════════════

def main() -> None:
    """Entry point — choose scenario set via CLI flag."""
    scenarios = list(LATTICE_SCENARIOS)
    if "--padic" in sys.argv:
        scenarios += PADIC_SCENARIOS

    print("\n" + "█" * 60)
    print(f"  RUNNING {len(scenarios)} SCENARIOS")
    print("█" * 60)
    failures = run_scenarios(scenarios)
    print("\n" + "█" * 60)
    print(f"  DONE — {failures} failure(s)")
    print("█" * 60 + "\n")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
