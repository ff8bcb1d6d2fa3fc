"""
Command-line interface: python -m spherebits <command> ...

Machine-readable output (JSON reports, CSV tables, point sets) goes to
standard output; logs and human summaries go to standard error.
Exit codes: 0 success, 2 invalid parameters, 3 file errors, 4 numerical failure.
"""

import functools
import json
import logging
from typing import List, Optional

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import bounds as bounds_mod
from .config import DEFAULT_SEED, DEFAULT_THREADS, configure_logging
from .discrepancy import (
    cap_exact_report,
    l2_wedge_exact,
    montecarlo_report,
    sup_wedge_lower,
    sup_wedge_net_upper,
    wedge_exact_report,
)
from .energy import minimize as minimize_energy, trace_frame
from .errors import InvalidParameterError, SphereBitsError
from .models import (
    BoundsConfig,
    DiscConfig,
    Family,
    GenConfig,
    MinimizeConfig,
    PartitionInspectConfig,
    ScalingConfig,
    SupConfig,
    VerifyConfig,
)
from .onebit import rip_sup_check
from .partition import analytic_diameter, build_partition
from .pointset_io import (
    frame_to_csv,
    pointset_to_csv,
    pointset_to_json,
    read_pointset,
    rows_frame,
    write_frame,
    write_pointset,
    write_report,
    write_text,
)
from .runner import scaling as run_scaling, stolarsky_verify
from .sampling import generate, random_set

logger = logging.getLogger(__name__)

app = typer.Typer(help="One-bit sphere tessellations: jittered sampling, wedge discrepancy and bounds.",
                  no_args_is_help=True, add_completion=False)
console = Console(stderr=True)

VERIFY_COLUMNS = ["N", "seed", "exact", "mc", "stderr", "zscore"]
SCALING_COLUMNS = ["N", "seeds", "mean_l2", "stderr", "reference"]


def command_boundary(fn):
    """Translate library and validation errors into exit codes"""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as e:
            for err in e.errors():
                field = ".".join(str(p) for p in err["loc"]) or "input"
                console.print(f"[red]invalid {field}:[/red] {err['msg']}")
            raise typer.Exit(code=2)
        except SphereBitsError as e:
            logger.error(f"{fn.__name__} failed: {e.detail}")
            console.print(f"[red]error:[/red] {e.detail}")
            raise typer.Exit(code=e.exit_code)
        except Exception as e:
            logger.error(f"{fn.__name__} failed unexpectedly: {str(e)}")
            raise
    return wrapper


def _echo_json(payload) -> None:
    typer.echo(json.dumps(payload, indent=2))


@app.callback()
def main(log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR")):
    configure_logging(log_level)


@app.command()
@command_boundary
def gen(
    method: str = typer.Option("jittered", "--method", "-m", help="random or jittered"),
    d: int = typer.Option(..., "-d", "--dim", help="sphere dimension"),
    N: int = typer.Option(..., "-N", "--size", help="number of points"),
    seed: int = typer.Option(DEFAULT_SEED, "--seed"),
    out: Optional[str] = typer.Option(None, "-o", "--out"),
    fmt: str = typer.Option("csv", "--format", help="csv or json"),
):
    """Generate a random or jittered point set."""
    cfg = GenConfig(method=method, d=d, N=N, seed=seed, out=out, fmt=fmt)
    Z = generate(cfg.method, cfg.d, cfg.N, cfg.seed)
    summary = {"N": Z.N, "d": Z.d, "method": cfg.method.value, "seed": cfg.seed}
    if cfg.out:
        write_pointset(Z, cfg.out, cfg.fmt)
        _echo_json({**summary, "out": cfg.out})
    else:
        typer.echo(pointset_to_json(Z) if cfg.fmt == "json" else pointset_to_csv(Z), nl=False)
        console.print(f"generated {Z.N} {cfg.method.value} points on S^{Z.d} (seed {cfg.seed})")


@app.command()
@command_boundary
def disc(
    path: str = typer.Argument(..., help="point set file (CSV or JSON)"),
    family: str = typer.Option("wedge", "--family", help="wedge or cap"),
    mode: str = typer.Option("exact", "--mode", help="exact, mc, sup or net"),
    M: int = typer.Option(1_000_000, "-M", "--samples", help="Monte-Carlo sample count"),
    budget: int = typer.Option(10_000, "--budget", help="sup search evaluations"),
    epsilon: float = typer.Option(0.2, "--epsilon", help="approximating family accuracy"),
    seed: int = typer.Option(DEFAULT_SEED, "--seed"),
    threads: int = typer.Option(DEFAULT_THREADS, "--threads"),
    out: Optional[str] = typer.Option(None, "-o", "--out"),
):
    """Discrepancy report for a point set."""
    cfg = DiscConfig(path=path, family=family, mode=mode, M=M, budget=budget,
                     epsilon=epsilon, seed=seed, threads=threads, out=out)
    if cfg.family == Family.SLICE:
        raise InvalidParameterError("slices support pointwise evaluation only; use --family wedge or cap")
    if cfg.mode in ("sup", "net") and cfg.family != Family.WEDGE:
        raise InvalidParameterError(f"--mode {cfg.mode} is available for wedges only")

    Z = read_pointset(cfg.path)
    if cfg.mode == "exact":
        report = wedge_exact_report(Z) if cfg.family == Family.WEDGE else cap_exact_report(Z)
    elif cfg.mode == "mc":
        report = montecarlo_report(Z, cfg.family, cfg.M, cfg.seed, cfg.threads)
    elif cfg.mode == "sup":
        report = sup_wedge_lower(Z, cfg.budget, np.random.default_rng(cfg.seed))
        report.seed = cfg.seed
    else:
        report = sup_wedge_net_upper(Z, cfg.epsilon)

    if cfg.out:
        write_report(report, cfg.out)
    typer.echo(report.model_dump_json(indent=2))


@app.command("stolarsky-verify")
@command_boundary
def stolarsky_verify_cmd(
    d: int = typer.Option(2, "-d", "--dim"),
    N_list: Optional[List[int]] = typer.Option(None, "-N", "--size", help="repeatable; default 1 2 8 32"),
    seeds: int = typer.Option(5, "--seeds"),
    M: int = typer.Option(2_000_000, "-M", "--samples"),
    seed: int = typer.Option(DEFAULT_SEED, "--seed"),
    threads: int = typer.Option(DEFAULT_THREADS, "--threads"),
    out: Optional[str] = typer.Option(None, "-o", "--out"),
):
    """Check the exact wedge L2 formula against Monte Carlo."""
    params = dict(d=d, seeds=seeds, M=M, seed=seed, threads=threads, out=out)
    if N_list:
        params["N_list"] = N_list
    cfg = VerifyConfig(**params)
    rows, summary = stolarsky_verify(cfg)
    frame = rows_frame(rows, VERIFY_COLUMNS)
    if cfg.out:
        write_frame(frame, cfg.out)
    typer.echo(frame_to_csv(frame), nl=False)
    status = "[green]PASS[/green]" if summary.passed else "[red]FAIL[/red]"
    console.print(f"{status} max |z| = {summary.max_abs_zscore:.3f} over {summary.runs} runs "
                  f"(threshold {summary.threshold})")


@app.command()
@command_boundary
def scaling(
    d: int = typer.Option(2, "-d", "--dim"),
    N_grid: Optional[List[int]] = typer.Option(None, "-N", "--size", help="repeatable; default 16 64 256 1024"),
    seeds: int = typer.Option(200, "--seeds"),
    method: str = typer.Option("jittered", "--method", "-m"),
    seed: int = typer.Option(DEFAULT_SEED, "--seed"),
    threads: int = typer.Option(DEFAULT_THREADS, "--threads"),
    out: Optional[str] = typer.Option(None, "-o", "--out"),
):
    """Mean L2 wedge discrepancy over a grid of N and its log-log slope."""
    params = dict(d=d, seeds=seeds, method=method, seed=seed, threads=threads, out=out)
    if N_grid:
        params["N_grid"] = N_grid
    cfg = ScalingConfig(**params)
    rows, summary = run_scaling(cfg)
    frame = rows_frame(rows, SCALING_COLUMNS)
    if cfg.out:
        write_frame(frame, cfg.out)
    typer.echo(frame_to_csv(frame), nl=False)

    table = Table(title=f"{cfg.method.value} scaling on S^{cfg.d}")
    for col in SCALING_COLUMNS:
        table.add_column(col, justify="right")
    for r in rows:
        table.add_row(str(r.N), str(r.seeds), f"{r.mean_l2:.4e}", f"{r.stderr:.2e}", f"{r.reference:.4e}")
    console.print(table)
    console.print(f"slope {summary.slope:.4f} (expected {summary.expected_slope:.4f} "
                  f"+/- {summary.tolerance}), within tolerance: {summary.within_tolerance}")


@app.command()
@command_boundary
def sup(
    path: str = typer.Argument(...),
    budget: int = typer.Option(100_000, "--budget"),
    epsilon: Optional[float] = typer.Option(None, "--epsilon", help="also compute the net upper bound"),
    delta: Optional[float] = typer.Option(None, "--delta", help="report whether the lower bound stays below delta"),
    seed: int = typer.Option(DEFAULT_SEED, "--seed"),
    out: Optional[str] = typer.Option(None, "-o", "--out"),
):
    """Bracket sup |Delta_Z| between a certified lower bound and an optional net upper bound."""
    cfg = SupConfig(path=path, budget=budget, epsilon=epsilon, delta=delta, seed=seed, out=out)
    Z = read_pointset(cfg.path)
    lower = sup_wedge_lower(Z, cfg.budget, np.random.default_rng(cfg.seed))
    lower.seed = cfg.seed
    payload = {"lower": lower.model_dump(mode="json")}
    if cfg.epsilon is not None:
        payload["upper"] = sup_wedge_net_upper(Z, cfg.epsilon).model_dump(mode="json")
    if cfg.delta is not None:
        check = rip_sup_check(Z, cfg.delta, cfg.budget, np.random.default_rng(cfg.seed))
        payload["rip_check"] = {"delta": cfg.delta, "passes": check.passes, "lower_bound": check.value}
    if cfg.out:
        write_report(lower, cfg.out)
    _echo_json(payload)


@app.command()
@command_boundary
def bounds(
    d: int = typer.Option(..., "-d", "--dim"),
    delta: Optional[float] = typer.Option(None, "--delta"),
):
    """Constants and bound formulas for S^d; with --delta also the sample size for delta-RIP."""
    cfg = BoundsConfig(d=d, delta=delta)
    payload = bounds_mod.bounds_table(cfg.d).model_dump()
    if cfg.delta is not None:
        payload["N_upper"] = bounds_mod.n_upper_report(cfg.d, cfg.delta).model_dump()
    _echo_json(payload)


@app.command()
@command_boundary
def minimize(
    path: Optional[str] = typer.Argument(None, help="initial point set; random when omitted"),
    d: int = typer.Option(2, "-d", "--dim"),
    N: int = typer.Option(12, "-N", "--size"),
    steps: int = typer.Option(500, "--steps"),
    tol: float = typer.Option(1e-8, "--tol"),
    seed: int = typer.Option(DEFAULT_SEED, "--seed"),
    out: Optional[str] = typer.Option(None, "-o", "--out"),
    trace: Optional[str] = typer.Option(None, "--trace", help="write the energy trace CSV here"),
):
    """Lower the wedge energy (and so the L2 wedge discrepancy) by gradient descent."""
    cfg = MinimizeConfig(path=path, d=d, N=N, steps=steps, tol=tol, seed=seed, out=out, trace=trace)
    Z0 = read_pointset(cfg.path) if cfg.path else random_set(cfg.d, cfg.N, cfg.seed)
    result = minimize_energy(Z0, cfg.steps, cfg.tol, np.random.default_rng(cfg.seed))
    if cfg.out:
        write_pointset(result.Z, cfg.out)
    if cfg.trace:
        write_frame(trace_frame(result), cfg.trace)

    _echo_json({
        "initial_energy": result.initial_energy,
        "final_energy": result.final_energy,
        "l2_wedge_exact": l2_wedge_exact(result.Z),
        "accepted_steps": result.accepted_steps,
        "converged": result.converged,
    })


@app.command("partition-inspect")
@command_boundary
def partition_inspect(
    d: int = typer.Option(..., "-d", "--dim"),
    N: int = typer.Option(..., "-N", "--size"),
    out: Optional[str] = typer.Option(None, "-o", "--out"),
):
    """Bands, cell counts and analytic diameter bounds of the regular partition."""
    cfg = PartitionInspectConfig(d=d, N=N, out=out)
    P = build_partition(cfg.d, cfg.N)
    diameters = [analytic_diameter(P, i) for i in range(P.N)]
    payload = {
        **P.to_dict(),
        "analytic_diameters": diameters,
        "max_analytic_diameter": max(diameters),
        "diameter_bound": bounds_mod.leopardi_Kd(cfg.d) * cfg.N ** (-1.0 / cfg.d),
    }
    text = json.dumps(payload, indent=2)
    if cfg.out:
        write_text(cfg.out, text + "\n")
    typer.echo(text)
