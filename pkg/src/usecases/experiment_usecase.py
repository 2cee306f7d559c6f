import logging
import math
import time
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from domain.errors import LabError
from domain.models import (
    ExperimentConfig,
    ExperimentKind,
    ProbeMode,
    ResultRow,
    RiskKind,
    TaskData,
    TaskSpec,
)
from infrastructure.metrics import (
    classification_risk,
    fit_probe,
    regression_excess_risk,
    regression_risk_for_weight,
    sin_theta,
)
from infrastructure.repositories.result_repository import ResultRepository
from infrastructure.sampling import (
    derive_seed,
    make_mixture_model,
    make_spiked_model,
    sample_mixture,
    sample_regression_task,
    sample_spiked,
    sample_task_vectors,
    sample_unit_vector,
)
from src.usecases.solver_registry import Problem, SolverRegistry

logger = logging.getLogger(__name__)

# sub-stream keys under a work item's seed
_MODEL, _SAMPLE, _DOWNSTREAM, _TASKS, _PROBE, _RISK = range(6)


def build_problem(cfg: ExperimentConfig, grid_value: float, seed: int) -> Problem:
    """Generate the data of one work item from its seed."""
    d = int(grid_value) if cfg.experiment == ExperimentKind.RECOVER_SWEEP_D else cfg.d
    n = int(grid_value) if cfg.experiment == ExperimentKind.RECOVER_SWEEP_N else cfg.n
    sigma = cfg.sigma

    if cfg.experiment == ExperimentKind.SUPCON_SWEEP_M:
        gmm = make_mixture_model(
            d, cfg.r, cfg.nu, sigma, derive_seed(seed, _MODEL), cfg.kappa, cfg.noise_profile, cfg.signal_support
        )
        labeled = sample_mixture(gmm, [int(grid_value)] * gmm.k, derive_seed(seed, _TASKS))
        unlabeled = sample_mixture(gmm, [n // gmm.k] * gmm.k, derive_seed(seed, _SAMPLE))
        return Problem(
            r=cfg.r,
            u_star=gmm.signal_basis(),
            x_unlab=np.array(unlabeled.x),
            class_blocks=labeled.blocks(gmm.k),
            seed=seed,
        )

    model = make_spiked_model(
        d, cfg.r, cfg.nu, sigma, derive_seed(seed, _MODEL), cfg.kappa, cfg.noise_profile, cfg.signal_support
    )
    task = TaskSpec(
        w_star=sample_unit_vector(cfg.r, derive_seed(seed, _DOWNSTREAM)),
        sigma_eps=cfg.sigma_eps,
        link=cfg.link,
    )
    tasks = []
    if cfg.experiment == ExperimentKind.TRANSFER_SWEEP_ALPHA:
        vectors = sample_task_vectors(cfg.r, cfg.t, derive_seed(seed, _TASKS))
        for index, w_t in enumerate(vectors):
            x_hat, y, _ = sample_regression_task(model, w_t, cfg.m, derive_seed(seed, _TASKS, index))
            tasks.append(TaskData(x_hat=x_hat, y=y))
    batch = sample_spiked(model, n, derive_seed(seed, _SAMPLE))
    return Problem(
        r=cfg.r,
        u_star=np.array(model.u_star),
        x_unlab=np.array(batch.x),
        tasks=tasks,
        model=model,
        task=task,
        seed=seed,
    )


def _downstream(cfg: ExperimentConfig, problem: Problem, u: np.ndarray, seed: int) -> Tuple[float, float]:
    """(excess risk, stderr); NaN when the problem has no downstream model."""
    if problem.model is None or problem.task is None:
        return math.nan, math.nan
    if cfg.risk == RiskKind.CLASSIFICATION:
        report = classification_risk(u, problem.model, problem.task, cfg.n_mc, derive_seed(seed, _RISK))
    elif cfg.probe == ProbeMode.REFIT:
        x_hat, y, _ = sample_regression_task(problem.model, problem.task.w_star, cfg.m, derive_seed(seed, _PROBE))
        noise = np.random.default_rng(derive_seed(seed, _PROBE, 1)).standard_normal(y.shape[0])
        w = fit_probe(u, x_hat, y + problem.task.sigma_eps * noise)
        report = regression_risk_for_weight(u, problem.model, problem.task, w)
    else:
        report = regression_excess_risk(u, problem.model, problem.task)
    return report.excess_risk, report.stderr


def run_work_item(
    cfg: ExperimentConfig,
    registry: SolverRegistry,
    grid_index: int,
    replicate: int,
    record_timing: bool,
) -> List[ResultRow]:
    """Fit every requested solver on one (grid point, replicate) and score it."""
    sweep_var, values = cfg.sweep()
    grid_value = values[grid_index]
    seed = derive_seed(cfg.seed, grid_index, replicate) if cfg.sweeps_data_size else derive_seed(cfg.seed, 0, replicate)
    alpha = None
    if cfg.experiment == ExperimentKind.TRANSFER_SWEEP_ALPHA:
        alpha = cfg.alpha_grid[grid_index]
    elif cfg.experiment == ExperimentKind.SUPCON_SWEEP_M:
        alpha = cfg.alpha_grid[0]
    problem = build_problem(cfg, grid_value, seed)

    rows = []
    for solver in cfg.solvers:
        started = time.perf_counter()
        sin_value, excess, stderr, error = math.nan, math.nan, math.nan, ""
        try:
            u = registry.fit(solver, problem, alpha)
            sin_value = sin_theta(u, problem.u_star).value
            excess, stderr = _downstream(cfg, problem, u, seed)
        except (LabError, ArithmeticError, ValueError) as e:
            logger.exception(f"Solver {solver.value} failed at {sweep_var}={grid_value}, replicate {replicate}")
            error = f"{type(e).__name__}: {e}"
        elapsed = (time.perf_counter() - started) * 1000.0
        logger.info(
            f"{solver.value} {sweep_var}={grid_value:g} rep={replicate}: "
            f"sin_theta={sin_value:.4f} excess={excess:.4e} ({elapsed:.1f} ms)"
        )
        rows.append(
            ResultRow(
                experiment=cfg.experiment.value,
                solver=solver.value,
                sweep_var=sweep_var,
                sweep_value=grid_value,
                replicate=replicate,
                seed=seed,
                sin_theta_f=sin_value,
                excess_risk=excess,
                stderr=stderr,
                wall_time_ms=elapsed if record_timing else 0.0,
                error=error,
            )
        )
    return rows


class ExperimentUseCase:
    """Runs a sweep as a parallel map over (grid point, replicate) work items."""

    def __init__(
        self,
        result_repository: ResultRepository,
        solver_registry: Optional[SolverRegistry] = None,
        n_jobs: int = 1,
        record_timing: bool = False,
    ):
        self.result_repository = result_repository
        self.solver_registry = solver_registry
        self.n_jobs = n_jobs
        self.record_timing = record_timing

    def run_experiment(self, cfg: ExperimentConfig) -> List[ResultRow]:
        self.result_repository.ensure_writable()
        registry = self.solver_registry or SolverRegistry(lam=cfg.lam, gd_iters=cfg.gd_iters)
        _, values = cfg.sweep()
        items = [(g, rep) for g in range(len(values)) for rep in range(cfg.replicates)]
        n_jobs = cfg.n_jobs if cfg.n_jobs != 1 else self.n_jobs
        record_timing = cfg.record_timing or self.record_timing
        logger.info(
            f"Running {cfg.experiment.value}: {len(values)} grid points x {cfg.replicates} replicates "
            f"x {len(cfg.solvers)} solvers on {n_jobs} job(s)"
        )
        started = time.perf_counter()
        batches = Parallel(n_jobs=n_jobs)(
            delayed(run_work_item)(cfg, registry, g, rep, record_timing) for g, rep in items
        )
        order = {solver.value: index for index, solver in enumerate(cfg.solvers)}
        keyed = [
            ((g, order[row.solver], rep), row)
            for (g, rep), batch in zip(items, batches)
            for row in batch
        ]
        rows = [row for _, row in sorted(keyed, key=lambda pair: pair[0])]
        self.result_repository.save_rows(cfg.experiment.value, rows)
        logger.info(f"Finished {cfg.experiment.value} in {time.perf_counter() - started:.1f} s")
        return rows
