"""Plain gradient descent over the representation matrix W."""
import logging

import numpy as np

from domain.errors import ContractError, StepSizeError
from domain.models import GDConfig, GDResult, LossData, LossSpec
from infrastructure.optim.losses import LossObjective

logger = logging.getLogger(__name__)

DEFAULT_STEP_FACTOR = 1e-2


def random_init(r: int, d: int, seed: int) -> np.ndarray:
    """Entries i.i.d. N(0, 1/d)."""
    return np.random.default_rng(seed).standard_normal((r, d)) / np.sqrt(d)


def minimize(spec: LossSpec, data: LossData, init, cfg: GDConfig) -> GDResult:
    """Gradient descent from ``init`` until max_iters or ||grad||_F <= grad_tol.

    Under the resample policy a fresh mask is drawn from the seeded stream
    at every step and applied to all samples; the recorded trace is the
    reference loss (the mask expectation) after each step.
    """
    objective = LossObjective(spec, data)
    w = np.array(init, dtype=float)
    if not np.any(w):
        raise ContractError("init must be nonzero; W = 0 is stationary for every loss")
    rng = np.random.default_rng(cfg.seed)
    step = cfg.step_size or DEFAULT_STEP_FACTOR / objective.scale()
    trace = [objective.value(w)]
    converged = False
    grad_norm = float("nan")
    iteration = 0

    for iteration in range(1, cfg.max_iters + 1):
        bits = rng.integers(0, 2, size=objective.d) if objective.resamples else None
        grad = objective.gradient(w, objective.matrix(bits))
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= cfg.grad_tol:
            converged = True
            iteration -= 1
            break
        w = w - step * grad
        loss = objective.value(w)
        if not np.isfinite(loss) or abs(loss) > cfg.divergence_threshold:
            raise StepSizeError(f"loss diverged to {loss:.3e} at iteration {iteration} (step {step:.3e})", iteration)
        trace.append(loss)

    logger.info(
        f"GD {spec.kind.value}: {iteration} iterations, loss {trace[-1]:.6e}, "
        f"grad norm {grad_norm:.3e}, converged={converged}"
    )
    return GDResult(
        w=w,
        trace=np.array(trace),
        iterations=iteration,
        converged=converged,
        grad_norm=grad_norm,
        step_size=step,
    )
