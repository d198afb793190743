"""
main.py — Command-line entry point

Parses the sub-command and its flags, merges them over an optional JSON
configuration file, dispatches to ``src.router.handler`` and prints the
report. Failures map to exit codes:

    0  success            2  configuration / ill-conditioned z
    1  verification fail  3  precision or resource cap

Run:
    python main.py survival --type A --rank 2 --z 0.4 0.4 --lambda 1 0
    python main.py poisson --n 2 --z 0.5 --lambda 0 --samples 4000 --format json
    python main.py verify-all --config run.json
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from src.config.run_config import RunConfig
from src.errors import (
    ConfigurationError,
    IllConditionedError,
    PrecisionError,
    ResourceCapError,
    ScsError,
    VerificationFailure,
)
from src.router.handler import COMMANDS, dispatch

LOG_FORMAT = "%(asctime)s | %(name)-30s | %(levelname)-7s | %(message)s"
logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scs",
        description="Weyl characters, chamber survival and Whittaker functions via random walks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON file with RunConfig fields")
        cmd.add_argument("--type", dest="type_label", help="Cartan type letter")
        cmd.add_argument("--rank", type=int)
        cmd.add_argument("--n", type=int, help="matrix size of PGL_n (type A, rank n−1)")
        cmd.add_argument("--z", type=float, nargs="+")
        cmd.add_argument("--z-basis", dest="z_basis", choices=RunConfig.Z_BASES)
        cmd.add_argument("--q", type=int)
        cmd.add_argument("--p", type=int)
        cmd.add_argument("--lambda", dest="lambda_coords", type=int, nargs="+")
        cmd.add_argument("--k", dest="minuscule_index", type=int, help="Λ∨ = ω_k∨")
        cmd.add_argument("--horizon", type=int)
        cmd.add_argument("--samples", type=int)
        cmd.add_argument("--seed", type=int)
        cmd.add_argument("--precision", type=int)
        cmd.add_argument("--format", dest="output_format", choices=RunConfig.OUTPUT_FORMATS)
        cmd.add_argument("--route", choices=RunConfig.ROUTES)
        cmd.add_argument("--threads", type=int)
        cmd.add_argument("--step-cap", dest="step_cap", type=int)
        cmd.add_argument("--enumeration-cap", dest="enumeration_cap", type=int)
        cmd.add_argument("--state-cap", dest="state_cap", type=int)
        cmd.add_argument("--wall-tolerance", dest="wall_tolerance", type=float)
        cmd.add_argument("--tolerance-scale", dest="tolerance_scale", type=float)
        cmd.add_argument("--b", dest="b_coords", type=int, nargs="+")
        cmd.add_argument("--grid-max", dest="grid_max", type=int)
        verbosity = cmd.add_mutually_exclusive_group()
        verbosity.add_argument("--verbose", action="store_true")
        verbosity.add_argument("--quiet", action="store_true")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults < --config file < explicit flags."""
    base = RunConfig.load(args.config) if args.config else RunConfig()
    overrides: Dict[str, Any] = {
        key: value
        for key, value in vars(args).items()
        if key not in ("command", "config", "n", "verbose", "quiet")
    }
    if args.n is not None:
        overrides["type_label"] = "A"
        overrides["rank"] = args.n - 1
    return base.merged(overrides).validate()


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt="%H:%M:%S")


# ---------------------------------------------------------------------------
# CLI entry point
# ---------------------------------------------------------------------------

def main(argv: Optional[List[str]] = None) -> int:
    """Parse args, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        cfg = resolve_config(args)
        report = dispatch(args.command, cfg)
        print(report.render(cfg.output_format))
        return 0
    except VerificationFailure as exc:
        logger.error("Verification failed: %s", exc)
        return exc.exit_code
    except (ConfigurationError, IllConditionedError) as exc:
        logger.error("Configuration error: %s", exc)
        return exc.exit_code
    except (PrecisionError, ResourceCapError) as exc:
        logger.error("Resource error: %s", exc)
        return exc.exit_code
    except ScsError as exc:
        logger.error("Error: %s", exc)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 – catch-all for unforeseens
        logger.exception("Unexpected error: %s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
