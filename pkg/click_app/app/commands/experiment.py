import logging
from typing import Dict, List, Optional

import click

from click_app.config import build_experiment_config, get_config
from domain.errors import ConfigError, OutputError
from domain.models import ExperimentKind
from infrastructure.repositories.result_repository import ResultRepository
from src.usecases.experiment_usecase import ExperimentUseCase
from src.usecases.solver_registry import SolverRegistry

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

# Initialize services (one use case per output directory)
_use_cases: Dict[str, ExperimentUseCase] = {}


def get_services(output_dir: str) -> ExperimentUseCase:
    """Initialize and return the experiment use case writing to output_dir."""
    if output_dir not in _use_cases:
        settings = get_config()
        _use_cases[output_dir] = ExperimentUseCase(
            result_repository=ResultRepository(output_dir),
            solver_registry=None,
            n_jobs=settings.N_JOBS,
            record_timing=settings.RECORD_TIMING,
        )
    return _use_cases[output_dir]


def _split(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise click.BadParameter("expected a comma-separated list")
    return items


def _ints(ctx, param, text):
    try:
        items = _split(text)
        return None if items is None else [int(item) for item in items]
    except ValueError:
        raise click.BadParameter(f"expected integers, got {text!r}")


def _floats(ctx, param, text):
    try:
        items = _split(text)
        return None if items is None else [float(item) for item in items]
    except ValueError:
        raise click.BadParameter(f"expected numbers, got {text!r}")


def _names(ctx, param, text):
    return _split(text)


@click.command("run")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="YAML experiment config.")
@click.option("--experiment", type=click.Choice([k.value for k in ExperimentKind]), help="Preset to run.")
@click.option("--d", callback=_ints, help="Ambient dimension, or the d grid of recover-sweep-d.")
@click.option("--n", callback=_ints, help="Unlabeled sample size, or the n grid of recover-sweep-n.")
@click.option("--m", callback=_ints, help="Labeled sample size, or the m grid of supcon-sweep-m.")
@click.option("--t", type=int, help="Number of source tasks.")
@click.option("--r", type=int, help="Signal rank.")
@click.option("--nu", type=float, help="Signal scale.")
@click.option("--sigma", callback=_floats, help="Noise level, or one level per coordinate.")
@click.option("--alpha-grid", callback=_floats, help="Comma-separated alpha values.")
@click.option("--replicates", type=int)
@click.option("--seed", type=int)
@click.option("--out", "output_path", type=click.Path(file_okay=False), help="Output directory.")
@click.option("--solvers", callback=_names, help="Comma-separated solver names.")
@click.option("--jobs", "n_jobs", type=int, help="Parallel workers.")
@click.pass_context
def run_command(ctx, config_path, experiment, d, n, m, t, r, nu, sigma, alpha_grid, replicates, seed,
                output_path, solvers, n_jobs):
    """Run one sweep and write results.csv and summary.md."""
    overrides = {
        "d": d, "n": n, "m": m, "t": t, "r": r, "nu": nu,
        "sigma": sigma[0] if sigma is not None and len(sigma) == 1 else sigma,
        "alpha_grid": alpha_grid, "replicates": replicates, "seed": seed,
        "output_path": output_path, "solvers": solvers, "n_jobs": n_jobs,
    }
    try:
        cfg = build_experiment_config(config_path, experiment, overrides)
    except ConfigError as e:
        click.echo(f"Config error: {e}", err=True)
        ctx.exit(EXIT_CONFIG)

    if cfg.experiment == ExperimentKind.VALIDATE:
        from click_app.app.commands.validate import report_validation
        ctx.exit(report_validation(cfg.seed))

    logger.info(f"Running {cfg.experiment.value} into {cfg.output_path}")
    try:
        rows = get_services(cfg.output_path).run_experiment(cfg)
    except OutputError as e:
        click.echo(f"I/O error: {e}", err=True)
        ctx.exit(EXIT_IO)

    failed = sum(1 for row in rows if row.error)
    click.echo(f"Wrote {len(rows)} rows ({failed} failed) to {cfg.output_path}/results.csv")
    ctx.exit(EXIT_OK)
