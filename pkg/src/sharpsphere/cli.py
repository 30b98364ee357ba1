"""Command-line entry point for sharpsphere.

Exit codes: 0 when every check passes, 1 when a mathematical check is
violated, 2 for an invalid configuration. Reports go to stdout (or --out);
logs go to stderr.
"""

from __future__ import annotations

import functools
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable

import click
import numpy as np
from dotenv import load_dotenv

from .certificates import (
    alpha_improved,
    critical_exponents,
    discriminant,
    figure_curves,
    find_beta,
    improved_constant,
    pointwise_h,
    quadratic_form_determinant,
    sos_check,
)
from .config import RunConfig, get_config
from .errors import ConfigError, DomainError
from .flows import (
    beckner_chain_check,
    default_time_grid,
    hypercontractivity_run,
    run_heat_flow,
    run_nonlinear_flow,
)
from .functionals import Exponent, logsob_ratio, polynomial_corpus, quotient_Qp
from .measure import NodalFn, normalization_Zd, quadrature_rule
from .minimizer import minimize_logsob, minimize_quotient, perturbation_sharpness
from .schemas import CertifyReport, ConstantsReport
from .spectral import Basis, basis_for, eigenvalue

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2

# A quotient below 1 - THEOREM_SLACK is reported as a violation
THEOREM_SLACK = 1e-3

# Random polynomials sampled by verify and certify
CORPUS_SIZE = 200
CERTIFY_CORPUS_SIZE = 100

# Relative to max(1, |h|): SOS reconstruction error, and how far below zero h may dip
SOS_TOLERANCE = 1e-9
H_TOLERANCE = 1e-10

ALPHA_TABLE_EXPONENTS = (1, 1.5, 2, 3, 4)


# =============================================================================
# Output helpers
# =============================================================================


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (float, Fraction, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def _round(value: Any) -> Any:
    """Round floats to 12 significant digits for JSON output; inf and nan become null."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (float, Fraction, np.floating)):
        v = float(value)
        return float(format(v, ".12g")) if math.isfinite(v) else None
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    return value


def _write(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text)
    else:
        out.write_text(text + "\n")


def _emit_record(record: dict[str, Any], fmt: str, out: Path | None) -> None:
    """Flat record as key=value lines, or as one JSON object."""
    if fmt == "json":
        _write(json.dumps(_round(record), indent=2, allow_nan=False), out)
    else:
        _write("\n".join(f"{k}={_fmt(v)}" for k, v in record.items()), out)


def _emit_table(header: list[str], rows: Iterable[Iterable[Any]], fmt: str, out: Path | None) -> None:
    rows = [list(r) for r in rows]
    if fmt == "json":
        _write(json.dumps(_round([dict(zip(header, r)) for r in rows]), indent=2, allow_nan=False), out)
    else:
        lines = [",".join(header)] + [",".join(_fmt(v) for v in r) for r in rows]
        _write("\n".join(lines), out)


def _handles_errors(func: Callable[..., int]) -> Callable[..., None]:
    """Run a command body and turn its result or a config error into an exit code."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            code = func(*args, **kwargs)
        except (ConfigError, DomainError) as exc:
            logger.error(f"[CLI] {exc}")
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        sys.exit(code)

    return wrapper


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational number: {text!r}") from exc


# =============================================================================
# Shared options
# =============================================================================


def _common(func: Callable) -> Callable:
    cfg = get_config()
    options = [
        click.option("--d", "d", type=float, default=3.0, show_default=True, help="Dimension d >= 1."),
        click.option("--nodes", type=int, default=cfg.nodes, show_default=True, help="Quadrature nodes."),
        click.option("--kmax", type=int, default=cfg.kmax, show_default=True, help="Basis degree K <= nodes/2."),
        click.option(
            "--format",
            "fmt",
            type=click.Choice(["csv", "json"]),
            default=cfg.output_format,
            show_default=True,
            help="Output format.",
        ),
        click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Output file."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log progress at INFO level.")
def main(verbose: bool) -> None:
    """Numerical checks of sharp interpolation inequalities on the sphere."""
    level = logging.INFO if verbose else getattr(logging, get_config().log_level, logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


# =============================================================================
# Commands
# =============================================================================


@main.command()
@click.option("--d", "d", type=float, required=True, help="Dimension d >= 1.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@_handles_errors
def constants(d: float, fmt: str, out: Path | None) -> int:
    """Print Z_d, 2*, 2#, the first eigenvalues and alpha(p, d)."""
    RunConfig(d=d).validate()
    two_star, two_sharp = critical_exponents(d)
    report = ConstantsReport(
        d=d,
        Z_d=normalization_Zd(d),
        two_star=float(two_star),
        two_sharp=float(two_sharp),
        eigenvalues=[eigenvalue(k, d) for k in range(1, 6)],
        alpha_table={_fmt(p): float(alpha_improved(float(p), d)) for p in ALPHA_TABLE_EXPONENTS},
    )
    if fmt == "json":
        _emit_record(report.model_dump(), fmt, out)
        return EXIT_OK
    record: dict[str, Any] = {"d": d, "Z_d": report.Z_d, "two_star": report.two_star, "two_sharp": report.two_sharp}
    record.update({f"lambda_{k}": lam for k, lam in enumerate(report.eigenvalues, start=1)})
    record.update({f"alpha[p={p}]": a for p, a in report.alpha_table.items()})
    _emit_record(record, fmt, out)
    return EXIT_OK


@main.command()
@_common
@click.option("--p", "p", type=float, default=4.0, show_default=True, help="Exponent p >= 1.")
@click.option("--starts", type=int, default=get_config().starts, show_default=True)
@click.option("--seed", type=int, default=get_config().seed, show_default=True)
@click.option("--workers", type=int, default=get_config().workers, show_default=True)
@_handles_errors
def verify(d, nodes, kmax, fmt, out, p, starts, seed, workers) -> int:
    """Sample the quotient on a random corpus and minimize it."""
    cfg = RunConfig(d=d, p=p, nodes=nodes, kmax=kmax, starts=starts, seed=seed, format=fmt, out=out).validate()
    exponent = Exponent(cfg.p, cfg.d)
    in_range = exponent.in_theorem_range
    if not in_range:
        logger.warning(f"[CLI] p={cfg.p} is outside theorem range for d={cfg.d} (cap {exponent.scan_cap:.6g})")

    basis = basis_for(quadrature_rule(cfg.d, cfg.nodes), cfg.kmax)
    corpus = polynomial_corpus(basis, CORPUS_SIZE, cfg.seed)
    if cfg.p == 2:
        corpus_min = min(logsob_ratio(f, cfg.d, basis) for f in corpus)
        result = minimize_logsob(cfg.d, cfg.starts, cfg.seed, nodes=cfg.nodes, kmax=cfg.kmax, workers=workers)
    else:
        corpus_min = min(quotient_Qp(f, exponent, basis) for f in corpus)
        result = minimize_quotient(exponent, cfg.starts, cfg.seed, nodes=cfg.nodes, kmax=cfg.kmax, workers=workers)

    passed = corpus_min >= 1 - THEOREM_SLACK and result.best_value >= 1 - THEOREM_SLACK
    _emit_record(
        {
            "d": cfg.d,
            "p": cfg.p,
            "functional": "logsob" if cfg.p == 2 else "quotient",
            "in_theorem_range": in_range,
            "corpus_min": corpus_min,
            "best_value": result.best_value,
            "converged": result.converged,
            "passed": passed,
        },
        cfg.format,
        cfg.out,
    )
    if not in_range:
        return EXIT_OK
    return EXIT_OK if passed else EXIT_VIOLATION


@main.command()
@_common
@click.option("--p", "p", type=float, default=4.0, show_default=True)
@click.option("--tmax", type=float, default=None, help="Final time (default 5/(2d)).")
@click.option("--samples", type=int, default=get_config().samples, show_default=True)
@click.option("--eps", type=float, default=0.1, show_default=True, help="f0 = 1 + eps x.")
@click.option("--method", type=click.Choice(["heat", "nonlinear"]), default="heat", show_default=True)
@_handles_errors
def flow(d, nodes, kmax, fmt, out, p, tmax, samples, eps, method) -> int:
    """Trace F and I along the flow started from 1 + eps x."""
    cfg = RunConfig(d=d, p=p, nodes=nodes, kmax=kmax, tmax=tmax, samples=samples, eps=eps, format=fmt, out=out)
    cfg.validate()
    exponent = Exponent(cfg.p, cfg.d)
    rule = quadrature_rule(cfg.d, cfg.nodes)
    basis = basis_for(rule, cfg.kmax)
    f0 = NodalFn.from_callable(rule, lambda x: 1.0 + cfg.eps * x)
    grid = default_time_grid(cfg.d, cfg.samples, cfg.tmax)
    runner = run_heat_flow if method == "heat" else run_nonlinear_flow
    trace = runner(f0, exponent, grid, basis=basis)

    if cfg.format == "json":
        _emit_record(trace.model_dump(), cfg.format, cfg.out)
    else:
        _emit_table(["t", "F", "I", "mass", "min_g"], trace.csv_rows(), cfg.format, cfg.out)

    if not exponent.flow_admissible:
        return EXIT_OK
    bound = trace.F[0] * np.exp(-2 * cfg.d * np.asarray(trace.times)) * (1 + 1e-9) + 1e-15
    return EXIT_OK if bool(np.all(np.asarray(trace.F) <= bound)) else EXIT_VIOLATION


@main.command()
@_common
@click.option("--p", "p", type=float, default=1.5, show_default=True, help="Exponent in (1, 2).")
@click.option("--eps", type=float, default=0.2, show_default=True, help="u = 1 + eps x.")
@_handles_errors
def hyper(d, nodes, kmax, fmt, out, p, eps) -> int:
    """Hypercontractivity at t* and the comparison chain."""
    cfg = RunConfig(d=d, p=p, nodes=nodes, kmax=kmax, eps=eps, format=fmt, out=out).validate()
    rule = quadrature_rule(cfg.d, cfg.nodes)
    basis = basis_for(rule, cfg.kmax)
    u = NodalFn.from_callable(rule, lambda x: 1.0 + cfg.eps * x)
    report = hypercontractivity_run(u, cfg.p, cfg.d, basis)
    chain = beckner_chain_check(u, cfg.p, cfg.d, basis)
    record = report.model_dump()
    record.update(
        {
            "chain_left": chain.left,
            "chain_middle": chain.middle,
            "chain_right": chain.right,
            "chain_holds": chain.holds,
        }
    )
    _emit_record(record, cfg.format, cfg.out)
    return EXIT_OK if report.holds and chain.holds else EXIT_VIOLATION


def _corpus_h_summary(corpus: Iterable[NodalFn], exponent: Exponent, basis: Basis) -> tuple[float, float, float]:
    """(min h, min h / max(1, max |h|), max |sos - h| / max(1, |h|)) over the corpus."""
    h_min = h_min_relative = math.inf
    sos_error = 0.0
    for f in corpus:
        h = pointwise_h(f, exponent, basis).values
        scale = np.maximum(1.0, np.abs(h))
        h_min = min(h_min, float(h.min()))
        h_min_relative = min(h_min_relative, float(h.min()) / float(scale.max()))
        sos_error = max(sos_error, float(np.max(np.abs(sos_check(f, exponent, basis).values - h) / scale)))
    return h_min, h_min_relative, sos_error


@main.command()
@click.option("--d", "d", type=str, default="3", show_default=True, help="Dimension (rational).")
@click.option("--p", "p", type=str, default="4", show_default=True, help="Exponent (rational).")
@click.option("--beta", type=str, default="1", show_default=True, help="Exponent of f = u^beta (rational).")
@click.option("--nodes", type=int, default=get_config().nodes, show_default=True)
@click.option("--seed", type=int, default=get_config().seed, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@_handles_errors
def certify(d, p, beta, nodes, seed, fmt, out) -> int:
    """Discriminant certificate plus pointwise h and SOS summary."""
    d_q, p_q, beta_q = _rational(d), _rational(p), _rational(beta)
    cfg = RunConfig(d=float(d_q), p=float(p_q), nodes=nodes, kmax=min(6, nodes // 2), seed=seed, format=fmt, out=out)
    cfg.validate()
    report = discriminant(p_q, d_q, beta_q)
    two_sharp = critical_exponents(d_q)[1]
    improved = improved_constant(p_q, d_q) if p_q <= two_sharp else None

    exponent = Exponent(cfg.p, cfg.d)
    basis = basis_for(quadrature_rule(cfg.d, cfg.nodes))
    corpus = polynomial_corpus(basis, CERTIFY_CORPUS_SIZE, cfg.seed)
    h_min, h_min_relative, sos_error = _corpus_h_summary(corpus, exponent, basis)
    best = find_beta(p_q, d_q)
    summary = CertifyReport(
        **{k: v for k, v in report.as_dict().items() if k != "delta_quadratic"},
        best_beta=None if best is None else float(best),
        alpha=float(alpha_improved(p_q, d_q)),
        improved_constant=None if improved is None else float(improved),
        determinant=float(quadratic_form_determinant(p_q, d_q)),
        h_min=h_min,
        h_min_relative=h_min_relative,
        sos_error_max=sos_error,
    )
    _emit_record(summary.model_dump(), cfg.format, cfg.out)

    violated = sos_error > SOS_TOLERANCE or (p_q <= two_sharp and h_min_relative < -H_TOLERANCE)
    return EXIT_VIOLATION if violated else EXIT_OK


@main.command()
@_common
@click.option("--p", "p", type=float, default=4.0, show_default=True)
@click.option("--starts", type=int, default=get_config().starts, show_default=True)
@click.option("--seed", type=int, default=get_config().seed, show_default=True)
@click.option("--workers", type=int, default=get_config().workers, show_default=True)
@_handles_errors
def minimize(d, nodes, kmax, fmt, out, p, starts, seed, workers) -> int:
    """Minimize Q_p (or the log-Sobolev ratio at p = 2)."""
    cfg = RunConfig(d=d, p=p, nodes=nodes, kmax=kmax, starts=starts, seed=seed, format=fmt, out=out).validate()
    exponent = Exponent(cfg.p, cfg.d)
    if cfg.p == 2:
        result = minimize_logsob(cfg.d, cfg.starts, cfg.seed, nodes=cfg.nodes, kmax=cfg.kmax, workers=workers)
    else:
        result = minimize_quotient(exponent, cfg.starts, cfg.seed, nodes=cfg.nodes, kmax=cfg.kmax, workers=workers)
    record = result.model_dump()
    if cfg.format == "csv":
        record.pop("argmin_values")
    _emit_record(record, cfg.format, cfg.out)
    if not exponent.in_theorem_range:
        return EXIT_OK
    return EXIT_OK if result.best_value >= 1 - THEOREM_SLACK else EXIT_VIOLATION


@main.command()
@click.option("--dmin", type=float, default=2.2, show_default=True)
@click.option("--dmax", type=float, default=10.0, show_default=True)
@click.option("--steps", type=int, default=100, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@_handles_errors
def figure(dmin, dmax, steps, fmt, out) -> int:
    """Curves d -> 2#(d) and d -> 2*(d)."""
    rows = figure_curves(dmin, dmax, steps)
    if all(r.two_star is not None for r in rows):
        _emit_table(["d", "two_sharp", "two_star"], ([r.d, r.two_sharp, r.two_star] for r in rows), fmt, out)
    else:
        _emit_table(["d", "two_sharp"], ([r.d, r.two_sharp] for r in rows), fmt, out)
    return EXIT_OK


@main.command()
@_common
@click.option("--p", "p", type=float, default=4.0, show_default=True)
@_handles_errors
def sharpness(d, nodes, kmax, fmt, out, p) -> int:
    """Quotient along 1 + eps x and its extrapolated limit."""
    cfg = RunConfig(d=d, p=p, nodes=nodes, kmax=kmax, format=fmt, out=out).validate()
    table = perturbation_sharpness(Exponent(cfg.p, cfg.d), nodes=cfg.nodes)
    if cfg.format == "json":
        _emit_record(table.model_dump(), cfg.format, cfg.out)
    else:
        _emit_table(["eps", "Q"], ([r.eps, r.Q] for r in table.rows), cfg.format, cfg.out)
    logger.info(f"[CLI] extrapolated limit {table.limit:.12g}")
    return EXIT_OK if abs(table.limit - 1) < 1e-6 else EXIT_VIOLATION


if __name__ == "__main__":
    main()
