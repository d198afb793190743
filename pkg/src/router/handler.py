"""
handler.py — Sub-command handlers and dispatcher

Each handler takes a validated ``RunConfig`` and returns a ``Report``;
``dispatch`` picks the handler with ``if / elif / else`` on the command name.

Routing rules:
  ┌──────────────────┬──────────────────────────────────────────────────┐
  │ Command          │ Handler                                          │
  ├──────────────────┼──────────────────────────────────────────────────┤
  │ character        │ cmd_character()      Weyl character, three ways  │
  │ survival         │ cmd_survival()       reflection / dp / mc        │
  │ whittaker-table  │ cmd_whittaker_table() values along a ray + gap   │
  │ padic-verify     │ cmd_padic_verify()   exact lemma enumeration     │
  │ poisson          │ cmd_poisson()        Poisson kernel Monte Carlo  │
  │ harmonicity      │ cmd_harmonicity()    mean-value identities       │
  │ datum            │ cmd_datum()          root datum document         │
  │ verify-all       │ cmd_verify_all()     acceptance suite            │
  └──────────────────┴──────────────────────────────────────────────────┘

Usage:
    from src.router.handler import dispatch
    report = dispatch("survival", RunConfig(lambda_coords=(1,)))
    print(report.render("table"))
"""

from __future__ import annotations

import logging
import math

from src.borel.simulation import alpha_harmonicity_mc, harmonicity_mc, poisson_mc
from src.borel.unipotent import BorelElement
from src.config.run_config import RunConfig
from src.errors import ConfigurationError, VerificationFailure
from src.padic.lemmas import verify_padic_lemmas
from src.report import Report, ResultRow
from src.roots.root_system import Coweight
from src.roots.weyl import weyl_group_order
from src.spectral.characters import (
    b_inverse_weyl_denominator,
    minuscule_character,
    require_dominant_z,
    weyl_character,
    weyl_dimension,
)
from src.spectral.hecke import (
    asymptotic_gap,
    coset_count_double,
    gindikin_karpelevich,
    macdonald_minuscule,
    scs_whittaker,
)
from src.verification.acceptance import run_acceptance
from src.walks.survival import survival_dp_result, survival_mc, survival_reflection

logger = logging.getLogger(__name__)

COMMANDS = (
    "character", "survival", "whittaker-table", "padic-verify",
    "poisson", "harmonicity", "datum", "verify-all",
)


def _report(command: str, cfg: RunConfig) -> Report:
    return Report(command=command, config=cfg.to_dict())


# ═══════════════════════════════════════════════════════════════════════════
# Lattice-level commands
# ═══════════════════════════════════════════════════════════════════════════

def cmd_character(cfg: RunConfig) -> Report:
    """ch V(λ∨)(z) by the Weyl formula and through the survival probability."""
    datum = cfg.datum()
    z = cfg.spectral_point(datum)
    lam = cfg.lam()
    require_dominant_z(datum, z, cfg.wall_tolerance)
    report = _report("character", cfg)

    character = weyl_character(datum, lam, z, cfg.wall_tolerance, cfg.enumeration_cap)
    survival = survival_reflection(datum, lam, z, tolerance=cfg.wall_tolerance, cap=cfg.enumeration_cap)
    via_walk = b_inverse_weyl_denominator(datum, z) * math.exp(z.pair(lam + datum.rho_check())) * survival
    report.add(ResultRow(lam.coords, character, "weyl"))
    report.add(ResultRow(lam.coords, via_walk, "survival", delta=abs(via_walk - character)))
    big_lambda = cfg.minuscule()
    if lam == big_lambda:
        value = minuscule_character(datum, big_lambda, z)
        report.add(ResultRow(lam.coords, value, "orbit-sum", delta=abs(value - character)))
    report.summary.update({
        "type": datum.type_label,
        "z_coroot_pairings": z.coroot_pairings(datum).tolist(),
        "weyl_dimension": weyl_dimension(datum, lam),
        "survival": survival,
    })
    return report


def cmd_survival(cfg: RunConfig) -> Report:
    """Survival probability of λ∨ + W^(z) by the selected routes."""
    datum = cfg.datum()
    z = cfg.spectral_point(datum)
    lam = cfg.lam()
    big_lambda = cfg.minuscule()
    report = _report("survival", cfg)
    datum.check_coweight(lam)

    if not lam.is_dominant():
        logger.warning("λ∨ = %s is not dominant; survival is 0", lam.coords)
        report.summary["status"] = "not dominant"
        report.add(ResultRow(lam.coords, 0.0, "not-dominant"))
        return report

    routes = ("reflection", "dp", "mc") if cfg.route == "all" else (cfg.route,)
    reference = survival_reflection(datum, lam, z, big_lambda, cfg.wall_tolerance, cfg.enumeration_cap)
    if "reflection" in routes:
        report.add(ResultRow(lam.coords, reference, "reflection"))
    if "dp" in routes:
        dp = survival_dp_result(
            datum, lam, z, big_lambda, cfg.horizon, cfg.state_cap, tolerance=cfg.wall_tolerance
        )
        report.add(ResultRow(lam.coords, dp.value, "dp", delta=abs(dp.value - reference)))
        report.summary["dp_truncation_bound"] = dp.truncation_bound
        report.summary["dp_box_shape"] = list(dp.box_shape)
    if "mc" in routes:
        mc = survival_mc(datum, lam, z, big_lambda, cfg.horizon, cfg.samples, cfg.seed, cfg.threads)
        report.add(ResultRow(
            lam.coords, mc.estimate, "mc", delta=abs(mc.estimate - reference), sigma=mc.sigma_distance(reference)
        ))
        report.summary["mc_stderr"] = mc.stderr
    report.summary.update({"type": datum.type_label, "horizon": cfg.horizon, "status": "dominant"})
    return report


def cmd_whittaker_table(cfg: RunConfig) -> Report:
    """W_z(ϖ^{−λ∨}) along λ∨ = k·(1, …, 1) with the distance to c(z)."""
    datum = cfg.datum()
    z = cfg.spectral_point(datum)
    report = _report("whittaker-table", cfg)

    below = Coweight((-1,) * datum.rank)
    value = scs_whittaker(datum, below, z, cfg.q, cfg.wall_tolerance, cfg.enumeration_cap)
    report.add(ResultRow(below.coords, value, "whittaker"))
    for k in range(cfg.grid_max + 1):
        lam = Coweight((k,) * datum.rank)
        value = scs_whittaker(datum, lam, z, cfg.q, cfg.wall_tolerance, cfg.enumeration_cap)
        gap = asymptotic_gap(datum, lam, z, cfg.q, cfg.wall_tolerance, cfg.enumeration_cap)
        report.add(ResultRow(lam.coords, value, "whittaker", delta=gap))
    report.summary.update({
        "type": datum.type_label,
        "q": cfg.q,
        "gindikin_karpelevich": gindikin_karpelevich(datum, z, cfg.q, cfg.wall_tolerance),
    })
    return report


def cmd_datum(cfg: RunConfig) -> Report:
    """The root datum document, minuscule coweight and Hecke counts."""
    datum = cfg.datum()
    report = _report("datum", cfg)
    big_lambda = cfg.minuscule()
    report.summary.update(datum.to_json())
    report.summary.update({
        "weyl_group_order": weyl_group_order(datum),
        "minuscule": list(big_lambda.coords),
        "coset_count": coset_count_double(datum, big_lambda, cfg.q),
    })
    try:
        z = cfg.spectral_point(datum)
        report.summary["macdonald_minuscule"] = macdonald_minuscule(datum, big_lambda, z, cfg.q)
    except ConfigurationError as exc:
        logger.debug("Skipping spherical value: %s", exc)
    return report


# ═══════════════════════════════════════════════════════════════════════════
# p-adic and Borel commands
# ═══════════════════════════════════════════════════════════════════════════

def cmd_padic_verify(cfg: RunConfig) -> Report:
    """Exact enumeration of the averaging, min-plus and translation lemmas."""
    report = _report("padic-verify", cfg)
    checks = verify_padic_lemmas(cfg.p, precision=min(cfg.precision, 4), bound=cfg.enumeration_cap)
    for check in checks:
        params = ", ".join(f"{k}={v}" for k, v in check.params.items())
        report.add(ResultRow((), check.value, f"{check.lemma}[{params}]", delta=check.value))
    failed = [c for c in checks if not c.passed]
    report.summary.update({"p": cfg.p, "checks": len(checks), "failed": len(failed)})
    if failed:
        raise VerificationFailure(f"{len(failed)} p-adic lemma checks failed, first: {failed[0]!r}")
    return report


def cmd_poisson(cfg: RunConfig) -> Report:
    """Poisson kernel Monte Carlo against the reflection formula."""
    n = cfg.matrix_size
    datum = cfg.datum()
    z = cfg.spectral_point(datum)
    lam = cfg.lam()
    report = _report("poisson", cfg)

    estimate = poisson_mc(
        n, lam, z, cfg.minuscule_index, cfg.samples, cfg.p, cfg.precision, cfg.seed,
        step_cap=cfg.step_cap, threads=cfg.threads,
    )
    reference = survival_reflection(datum, lam, z) if lam.is_dominant() else 0.0
    report.add(ResultRow(
        lam.coords, estimate.estimate, "poisson-mc",
        delta=abs(estimate.estimate - reference), sigma=estimate.sigma_distance(reference),
    ))
    report.summary.update({
        "estimate": estimate.estimate,
        "stderr": estimate.stderr,
        "reference": reference,
        "sigma_distance": estimate.sigma_distance(reference),
    })
    return report


def cmd_harmonicity(cfg: RunConfig) -> Report:
    """Harmonicity of χ^{−1}ψ_χ and α-harmonicity of W_χ at b = ϖ^{−b∨}."""
    n = cfg.matrix_size
    datum = cfg.datum()
    z = cfg.spectral_point(datum)
    b_mu = cfg.b()
    b = BorelElement.torus(n, cfg.p, b_mu)
    report = _report("harmonicity", cfg)

    plain = harmonicity_mc(
        n, b, z, cfg.minuscule_index, cfg.samples, cfg.seed, cfg.p, cfg.precision, cfg.threads
    )
    report.add(ResultRow(
        b_mu.coords, plain.lhs.real, "harmonic", delta=abs(plain.lhs - plain.rhs), sigma=plain.sigma_distance()
    ))
    report.summary.update({"estimate": plain.lhs, "stderr": plain.stderr, "reference": plain.rhs,
                           "sigma_distance": plain.sigma_distance()})
    if b_mu.is_dominant():
        alpha = alpha_harmonicity_mc(
            n, b, z, cfg.minuscule_index, cfg.samples, cfg.seed + 1, cfg.p, cfg.precision,
            threads=cfg.threads,
        )
        report.add(ResultRow(
            b_mu.coords, alpha.lhs.real, "alpha-harmonic",
            delta=abs(alpha.lhs - alpha.rhs), sigma=alpha.sigma_distance(),
        ))
        report.summary["alpha_eigenvalue"] = alpha.rhs.real
    return report


def cmd_verify_all(cfg: RunConfig) -> Report:
    """Run the acceptance suite; raises ``VerificationFailure`` naming failures."""
    report = _report("verify-all", cfg)
    results = run_acceptance(cfg)
    for result in results:
        report.add(ResultRow((), result.measured, f"criterion-{result.identifier}", delta=result.threshold))
    report.summary["criteria"] = [r.as_dict() for r in results]
    failed = [r for r in results if not r.passed]
    report.summary["status"] = "PASS" if not failed else "FAIL"
    if failed:
        names = ", ".join(f"{r.identifier} ({r.name})" for r in failed)
        print(report.render(cfg.output_format))
        raise VerificationFailure(f"Acceptance criteria failed: {names}")
    return report


# ═══════════════════════════════════════════════════════════════════════════
# Dispatcher
# ═══════════════════════════════════════════════════════════════════════════

def dispatch(command: str, cfg: RunConfig) -> Report:
    """Run ``command`` on a validated configuration.

    Raises:
        ConfigurationError: If the command is unknown.
    """
    logger.info("Dispatching  command=%r  type=%s%d  seed=%d", command, cfg.type_label, cfg.rank, cfg.seed)

    if command == "character":
        return cmd_character(cfg)
    elif command == "survival":
        return cmd_survival(cfg)
    elif command == "whittaker-table":
        return cmd_whittaker_table(cfg)
    elif command == "padic-verify":
        return cmd_padic_verify(cfg)
    elif command == "poisson":
        return cmd_poisson(cfg)
    elif command == "harmonicity":
        return cmd_harmonicity(cfg)
    elif command == "datum":
        return cmd_datum(cfg)
    elif command == "verify-all":
        return cmd_verify_all(cfg)
    else:
        raise ConfigurationError(f"Unknown command {command!r}; choose one of {COMMANDS!r}")
