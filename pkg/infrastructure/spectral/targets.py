"""Closed-form target matrices of the contrastive and reconstruction losses.

Negative-pair sums over all i != j are evaluated through column sums,
X (11^T - I) X^T = s s^T - X X^T with s = X 1, so no n x n matrix is formed.
"""
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from domain.errors import (
    CenteringDegeneracyError,
    ContrastDegeneracyError,
    DimensionError,
    NoNegativesError,
    WithinClassContrastError,
)
from domain.models import Provenance, SymTarget, TaskData

logger = logging.getLogger(__name__)

TaskLike = Union[TaskData, Tuple[np.ndarray, np.ndarray]]


def _matrix(x, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionError(f"{name} must be a d x n matrix, got shape {x.shape}")
    return x


def negative_pair_sum(x: np.ndarray) -> np.ndarray:
    """X (11^T - I) X^T, the sum of x_i x_j^T over ordered pairs i != j."""
    s = x.sum(axis=1)
    return np.outer(s, s) - x @ x.T


def split_diagonal(m) -> Tuple[np.ndarray, np.ndarray]:
    """(D(m), Delta(m)) with D(m) + Delta(m) == m exactly."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    diag_part = np.diag(np.diag(m))
    return diag_part, m - diag_part


def augmented_pair_matrix(x1, x2) -> SymTarget:
    x1, x2 = _matrix(x1, "x1"), _matrix(x2, "x2")
    if x1.shape != x2.shape:
        raise DimensionError(f"view shapes differ: {x1.shape} vs {x2.shape}")
    n = x1.shape[1]
    if n < 2:
        raise ContrastDegeneracyError(f"negative pairs need n >= 2, got n={n}")
    cross = x1 @ x2.T
    m = cross + cross.T - negative_pair_sum(x1 + x2) / (2.0 * (n - 1))
    return SymTarget(m=m, provenance=Provenance.SELFCON_AUGPAIR)


def masking_expectation_matrix(x) -> SymTarget:
    x = _matrix(x)
    n = x.shape[1]
    if n < 2:
        raise ContrastDegeneracyError(f"negative pairs need n >= 2, got n={n}")
    _, off_diagonal = split_diagonal(x @ x.T)
    m = off_diagonal - negative_pair_sum(x) / (n - 1)
    return SymTarget(m=m, provenance=Provenance.SELFCON_MASKING)


def pca_matrix(x) -> SymTarget:
    x = _matrix(x)
    if x.shape[1] < 1:
        raise DimensionError("pca needs at least one sample")
    centered = x - x.mean(axis=1, keepdims=True)
    return SymTarget(m=centered @ centered.T, provenance=Provenance.PCA)


def masked_ae_matrix(x) -> SymTarget:
    x = _matrix(x)
    if x.shape[1] < 1:
        raise DimensionError("masked autoencoder needs at least one sample")
    diag_part, off_diagonal = split_diagonal(x @ x.T)
    return SymTarget(m=0.5 * off_diagonal + diag_part, provenance=Provenance.MASKED_AE)


def supervised_contrast_matrix(class_blocks: Sequence[np.ndarray], alpha: Sequence[float]) -> np.ndarray:
    """Supervised summand of the hybrid target, class weights alpha_k."""
    blocks = [_matrix(block, "class block") for block in class_blocks]
    k = len(blocks)
    if k < 2:
        raise NoNegativesError(f"supervised contrast needs at least two classes, got {k}")
    if len(alpha) != k:
        raise DimensionError(f"expected {k} class weights, got {len(alpha)}")
    sizes = [block.shape[1] for block in blocks]
    if min(sizes) < 2:
        raise WithinClassContrastError(f"every class needs at least two samples, got {sizes}")
    sums = [block.sum(axis=1) for block in blocks]
    total_sum, total = np.sum(sums, axis=0), sum(sizes)
    result = np.zeros((blocks[0].shape[0],) * 2)
    for block, s_k, n_k, a_k in zip(blocks, sums, sizes, alpha):
        if a_k == 0:
            continue
        within = negative_pair_sum(block) / (n_k - 1)
        others = total_sum - s_k
        between = 0.5 * (np.outer(s_k, others) + np.outer(others, s_k)) / (total - n_k)
        result += a_k / (k * n_k) * (within - between)
    return result


def supcon_hybrid_matrix(
    x_unlab: Optional[np.ndarray],
    class_blocks: Sequence[np.ndarray],
    alpha: Sequence[float],
) -> SymTarget:
    """Self-supervised masking target plus the supervised summand.

    An empty (or missing) unlabeled sample gives the pure supervised target.
    """
    m = supervised_contrast_matrix(class_blocks, alpha)
    if x_unlab is not None and _matrix(x_unlab).shape[1] > 0:
        n = _matrix(x_unlab).shape[1]
        m = m + masking_expectation_matrix(x_unlab).m / (4.0 * n)
    return SymTarget(m=m, provenance=Provenance.SUPCON_HYBRID)


def hsic_cross_matrix(x_hat, y) -> SymTarget:
    x_hat = _matrix(x_hat, "x_hat")
    y = np.asarray(y, dtype=float)
    m = x_hat.shape[1]
    if y.shape != (m,):
        raise DimensionError(f"expected {m} labels, got shape {y.shape}")
    if m < 2:
        raise CenteringDegeneracyError(f"centering needs m >= 2, got m={m}")
    v = x_hat @ (y - y.mean())
    return SymTarget(m=np.outer(v, v) / (m - 1) ** 2, provenance=Provenance.HSIC)


def _task_arrays(task: TaskLike) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(task, TaskData):
        return task.x_hat, task.y
    return task


def transfer_hybrid_matrix(x_unlab, tasks: Sequence[TaskLike], alpha: Sequence[float]) -> SymTarget:
    x_unlab = _matrix(x_unlab, "x_unlab")
    if len(alpha) != len(tasks):
        raise DimensionError(f"expected {len(tasks)} task weights, got {len(alpha)}")
    m = masking_expectation_matrix(x_unlab).m / (4.0 * x_unlab.shape[1])
    for task, a_t in zip(tasks, alpha):
        m = m + a_t * hsic_cross_matrix(*_task_arrays(task)).m
    return SymTarget(m=m, provenance=Provenance.TRANSFER_HYBRID)

