"""Downstream risk of linear probes on top of a representation subspace u.

Regression uses the closed-form population risk of the probe w on u^T x,

    risk(w) = ||w*||^2 + sigma_eps^2 - 2 b^T w + w^T A w,
    A = nu^2 u^T U* U*^T u + u^T Sigma u,   b = nu u^T U* w*,

minimized at w = A^{-1} b. Classification thresholds the probe score at
zero and is estimated by Monte Carlo with common random numbers.
"""
import logging
import math
from typing import Tuple

import numpy as np
import scipy.special

from domain.errors import ContractError, DimensionError, NumericError, SingularityError, ZeroScaleError
from domain.models import Link, RiskReport, SpikedModel, TaskSpec
from infrastructure.metrics.subspace import check_orthonormal

logger = logging.getLogger(__name__)

MIN_MC_SAMPLES = 10_000
SHARD_SIZE = 200_000
MAX_CONDITION = 1e12
EXCESS_TOLERANCE = 1e-10


def _link_cdf(link: Link, values: np.ndarray) -> np.ndarray:
    if Link(link) == Link.PROBIT:
        return scipy.special.ndtr(values)
    return scipy.special.expit(values)


def _moments(u, model: SpikedModel, task: TaskSpec) -> Tuple[np.ndarray, np.ndarray]:
    u = check_orthonormal(u)
    if u.shape[0] != model.d:
        raise DimensionError(f"u has {u.shape[0]} rows, model has d={model.d}")
    if task.w_star.shape != (model.r,):
        raise DimensionError(f"w_star must have length r={model.r}")
    overlap = u.T @ model.u_star
    a = model.nu ** 2 * overlap @ overlap.T + (u.T * model.sigma ** 2) @ u
    b = model.nu * overlap @ task.w_star
    return a, b


def _solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    condition = np.linalg.cond(a)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularityError(f"probe system is singular (condition {condition:.3e})")
    return np.linalg.solve(a, b)


def optimal_probe_weight(u, model: SpikedModel, task: TaskSpec) -> np.ndarray:
    """Population-optimal regression probe A^{-1} b."""
    a, b = _moments(u, model, task)
    return _solve(a, b)


def probe_risk(u, model: SpikedModel, task: TaskSpec, w) -> float:
    """Population squared-error risk of the probe w on u^T x."""
    a, b = _moments(u, model, task)
    w = np.asarray(w, dtype=float)
    return float(task.w_star @ task.w_star + task.sigma_eps ** 2 - 2.0 * b @ w + w @ a @ w)


def _optimal_risk(u, model: SpikedModel, task: TaskSpec) -> float:
    a, b = _moments(u, model, task)
    return float(task.w_star @ task.w_star + task.sigma_eps ** 2 - b @ _solve(a, b))


def _report(absolute: float, optimal: float, stderr: float = 0.0, n_mc: int = 0) -> RiskReport:
    """Package a risk and its excess over the U* probe.

    A closed-form excess below zero means U* is not the best rank-r
    representation for this noise, so the reference is invalid.
    """
    excess = absolute - optimal
    if n_mc == 0 and excess < -EXCESS_TOLERANCE:
        raise NumericError(f"excess risk {excess:.3e} is below the U* probe optimum")
    if excess < -3.0 * stderr - EXCESS_TOLERANCE:
        logger.warning(f"Excess risk {excess:.3e} is below the U* probe optimum")
    return RiskReport(absolute_risk=absolute, excess_risk=excess, optimal_risk=optimal, stderr=stderr, n_mc=n_mc)


def regression_excess_risk(u, model: SpikedModel, task: TaskSpec) -> RiskReport:
    """Closed-form regression risk of the optimal probe and its excess over U*."""
    return _report(_optimal_risk(u, model, task), _optimal_risk(model.u_star, model, task))


def regression_risk_for_weight(u, model: SpikedModel, task: TaskSpec, w) -> RiskReport:
    """Closed-form risk of a given probe (e.g. one refit on finite data)."""
    return _report(probe_risk(u, model, task, w), _optimal_risk(model.u_star, model, task))


def fit_probe(u, x_hat: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares probe of y on u^T x_hat (x_hat is d x m)."""
    features = np.asarray(x_hat, dtype=float).T @ check_orthonormal(u)
    w, *_ = np.linalg.lstsq(features, np.asarray(y, dtype=float), rcond=None)
    return w


def _draw(model: SpikedModel, task: TaskSpec, n: int, rng: np.random.Generator, binary: bool):
    if model.nu == 0:
        raise ZeroScaleError("the response divides by nu, which is zero")
    z = model.nu * rng.standard_normal((n, model.r))
    x = z @ model.u_star.T + model.sigma * rng.standard_normal((n, model.d))
    signal = z @ task.w_star / model.nu
    if binary:
        y = rng.uniform(size=n) < _link_cdf(task.link, signal)
    else:
        y = signal + task.sigma_eps * rng.standard_normal(n)
    return x, y


def monte_carlo_regression_risk(u, model: SpikedModel, task: TaskSpec, w, n: int, seed: int) -> Tuple[float, float]:
    """(mean squared error, standard error) of the probe w on n fresh samples."""
    u = check_orthonormal(u)
    x, y = _draw(model, task, n, np.random.default_rng(seed), binary=False)
    errors = (y - x @ u @ np.asarray(w, dtype=float)) ** 2
    return float(errors.mean()), float(errors.std(ddof=1) / math.sqrt(n))


def classification_direction(u, model: SpikedModel, task: TaskSpec) -> np.ndarray:
    """Risk-optimal probe direction (u^T Sigma_x u)^{-1} u^T U* w*."""
    u = check_orthonormal(u)
    covariance = u.T @ model.covariance() @ u
    return _solve(covariance, u.T @ model.u_star @ task.w_star)


def _shards(n_mc: int, seed: int):
    count = math.ceil(n_mc / SHARD_SIZE)
    children = np.random.SeedSequence(seed).spawn(count)
    for index, child in enumerate(children):
        size = min(SHARD_SIZE, n_mc - index * SHARD_SIZE)
        yield size, np.random.default_rng(child)


def _check_mc(n_mc: int):
    if n_mc < MIN_MC_SAMPLES:
        raise ContractError(f"n_mc must be at least {MIN_MC_SAMPLES}, got {n_mc}")


def classification_risk_for_weight(u, model: SpikedModel, task: TaskSpec, w, n_mc: int, seed: int) -> float:
    """Monte Carlo 0-1 risk of the classifier 1{w^T u^T x >= 0}."""
    _check_mc(n_mc)
    u = check_orthonormal(u)
    projection = u @ np.asarray(w, dtype=float)
    errors = 0.0
    for size, rng in _shards(n_mc, seed):
        x, y = _draw(model, task, size, rng, binary=True)
        errors += float(np.sum(y != (x @ projection >= 0)))
    return errors / n_mc


def classification_risk(u, model: SpikedModel, task: TaskSpec, n_mc: int, seed: int) -> RiskReport:
    """0-1 risk of the optimal probe direction, paired against U* on the same draws."""
    _check_mc(n_mc)
    projection = check_orthonormal(u) @ classification_direction(u, model, task)
    reference = model.u_star @ classification_direction(model.u_star, model, task)
    loss_sum = reference_sum = diff_sum = diff_sq = 0.0
    for size, rng in _shards(n_mc, seed):
        x, y = _draw(model, task, size, rng, binary=True)
        losses = (y != (x @ projection >= 0)).astype(float)
        reference_losses = (y != (x @ reference >= 0)).astype(float)
        diff = losses - reference_losses
        loss_sum += losses.sum()
        reference_sum += reference_losses.sum()
        diff_sum += diff.sum()
        diff_sq += float(diff @ diff)
    mean_diff = diff_sum / n_mc
    variance = max(diff_sq / n_mc - mean_diff ** 2, 0.0) * n_mc / (n_mc - 1)
    return _report(loss_sum / n_mc, reference_sum / n_mc, math.sqrt(variance / n_mc), n_mc)
