"""Loss functions of every kind, their analytic gradients and a finite-difference check.

With P = W^T W the contrastive kinds reduce to

    L(W) = -tr(P S) + (lam / 2) tr(P^2)

for a data-dependent symmetric S, and the autoencoder kinds to

    L(W) = tr(M) - 2 tr(D W M) + tr(W^T D^T D W M)

with D the decoder (W^T when tied) and M a scaled second-moment matrix.
"""
import logging
from typing import Optional

import numpy as np

from domain.errors import ContractError, DimensionError
from domain.models import LossData, LossKind, LossSpec, MaskPolicy
from infrastructure.spectral.eigensolver import top_r_eigenbasis
from infrastructure.spectral.targets import (
    augmented_pair_matrix,
    negative_pair_sum,
    split_diagonal,
    supervised_contrast_matrix,
    hsic_cross_matrix,
)

logger = logging.getLogger(__name__)

CONTRASTIVE_KINDS = frozenset({LossKind.SELFCON, LossKind.SUPCON_HYBRID, LossKind.HSIC_TRANSFER})
AUTOENCODER_KINDS = frozenset({LossKind.AUTOENCODER, LossKind.MASKED_AUTOENCODER})
MASKED_KINDS = frozenset(CONTRASTIVE_KINDS | {LossKind.MASKED_AUTOENCODER})


class LossObjective:
    """One loss kind bound to one data bundle.

    Everything that does not depend on W is computed once here. Under the
    resample policy, ``matrix(bits)`` gives the data matrix for a single
    mask; everywhere else the reference matrix (fixed-mask average or mask
    expectation) is used.
    """

    def __init__(self, spec: LossSpec, data: LossData):
        self.spec = spec
        self.kind = LossKind(spec.kind)
        self.decoder = data.decoder
        self._gram = None
        self._negatives = None
        self._n = 0
        self._fixed = None

        if self.kind in CONTRASTIVE_KINDS:
            self._prepare_contrastive(data)
        else:
            self._prepare_autoencoder(data)
        self.d = self.reference.shape[0]
        logger.debug(f"Prepared {self.kind.value} objective (d={self.d})")

    # -- data matrices -------------------------------------------------

    def _prepare_contrastive(self, data: LossData):
        extra = 0.0
        if self.kind == LossKind.SELFCON:
            if data.views is None and data.x is None:
                raise ContractError("selfcon needs either views or x")
        elif self.kind == LossKind.SUPCON_HYBRID:
            if not data.class_blocks:
                raise ContractError("supcon-hybrid needs class blocks")
            if len(self.spec.alpha) != len(data.class_blocks):
                raise ContractError(
                    f"supcon-hybrid needs {len(data.class_blocks)} class weights, got {len(self.spec.alpha)}"
                )
            extra = supervised_contrast_matrix(data.class_blocks, self.spec.alpha)
        else:
            if data.x is None:
                raise ContractError("hsic-transfer needs the unlabeled sample x")
            if len(self.spec.alpha) != len(data.tasks):
                raise ContractError(
                    f"hsic-transfer needs {len(data.tasks)} task weights, got {len(self.spec.alpha)}"
                )
            extra = sum(
                (a * hsic_cross_matrix(task.x_hat, task.y).m for a, task in zip(self.spec.alpha, data.tasks)),
                np.zeros((data.x.shape[0],) * 2),
            )

        if data.views is not None and self.kind == LossKind.SELFCON:
            self._views_matrix = self._from_views(*data.views)
            self.reference = self._views_matrix
            self._extra = 0.0
            return
        self._views_matrix = None
        self._extra = extra
        x = data.x if data.x is not None and data.x.shape[1] > 0 else None
        if x is None:
            if self.kind == LossKind.SELFCON:
                raise ContractError("selfcon needs at least one sample")
            self.reference = np.asarray(extra, dtype=float)
            return
        self._bind_sample(x)
        self.reference = self._masked_matrix(None) + extra

    def _prepare_autoencoder(self, data: LossData):
        if data.x is None:
            raise ContractError(f"{self.kind.value} needs the sample x")
        x = data.x
        if self.kind == LossKind.AUTOENCODER:
            x = x - x.mean(axis=1, keepdims=True)
        self._views_matrix = None
        self._extra = 0.0
        self._bind_sample(x)
        if self.kind == LossKind.AUTOENCODER:
            self.reference = self._gram / self._n
        else:
            self.reference = self._masked_matrix(None)

    def _bind_sample(self, x: np.ndarray):
        self._n = x.shape[1]
        self._gram = x @ x.T
        if self.kind in CONTRASTIVE_KINDS:
            if self._n < 2:
                logger.warning("Single sample: negative-pair sum is empty and contributes 0")
                self._negatives = np.zeros_like(self._gram)
            else:
                self._negatives = negative_pair_sum(x) / (2.0 * (self._n - 1))
        if self.kind in MASKED_KINDS and self.spec.mask_policy == MaskPolicy.FIXED:
            if any(mask.d != x.shape[0] for mask in self.spec.masks):
                raise DimensionError(f"mask length differs from d={x.shape[0]}")
            self._fixed = np.mean([self._mask_matrix(m.bits.astype(float)) for m in self.spec.masks], axis=0)

    def _from_views(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        if x1.shape != x2.shape:
            raise DimensionError(f"view shapes differ: {x1.shape} vs {x2.shape}")
        n = x1.shape[1]
        if n < 2:
            logger.warning("Single pair: negative-pair sum is empty and contributes 0")
            cross = x1 @ x2.T
            return (cross + cross.T) / (2.0 * n)
        return augmented_pair_matrix(x1, x2).m / (2.0 * n)

    def _mask_matrix(self, bits: np.ndarray) -> np.ndarray:
        """Data matrix for one mask A = diag(bits)."""
        rest = 1.0 - bits
        if self.kind == LossKind.MASKED_AUTOENCODER:
            weights = np.outer(bits, bits) + np.outer(rest, rest)
            return self._gram * weights / (2.0 * self._n)
        weights = np.outer(bits, rest) + np.outer(rest, bits)
        return (self._gram * weights - self._negatives) / (2.0 * self._n)

    def _expected_matrix(self) -> np.ndarray:
        diag_part, off_diagonal = split_diagonal(self._gram)
        if self.kind == LossKind.MASKED_AUTOENCODER:
            return (0.5 * off_diagonal + diag_part) / (2.0 * self._n)
        return (0.5 * off_diagonal - self._negatives) / (2.0 * self._n)

    def _masked_matrix(self, bits: Optional[np.ndarray]) -> np.ndarray:
        if bits is not None:
            return self._mask_matrix(bits)
        if self._fixed is not None:
            return self._fixed
        return self._expected_matrix()

    @property
    def resamples(self) -> bool:
        return (
            self.spec.mask_policy == MaskPolicy.RESAMPLE
            and self.kind in MASKED_KINDS
            and self._views_matrix is None
            and self._gram is not None
        )

    def matrix(self, bits: Optional[np.ndarray] = None) -> np.ndarray:
        """S (contrastive kinds) or M (autoencoder kinds), for one mask if given."""
        if bits is None or not self.resamples:
            return self.reference
        return self._masked_matrix(np.asarray(bits, dtype=float)) + self._extra

    def scale(self) -> float:
        return max(float(np.linalg.norm(self.reference, 2)), np.finfo(float).tiny)

    # -- value and gradient --------------------------------------------

    def _check(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.ndim != 2 or w.shape[1] != self.d:
            raise DimensionError(f"W must be r x {self.d}, got shape {w.shape}")
        if self.decoder is not None and self.decoder.shape != (self.d, w.shape[0]):
            raise ContractError(f"decoder must be {self.d} x {w.shape[0]}, got {self.decoder.shape}")
        return w

    def value(self, w, matrix: Optional[np.ndarray] = None) -> float:
        w = self._check(w)
        s = self.reference if matrix is None else matrix
        if self.kind in CONTRASTIVE_KINDS:
            p = w.T @ w
            return float(-np.sum(p * s) + 0.5 * self.spec.lam * np.sum(p * p))
        if self.decoder is None:
            p = w.T @ w
            return float(np.trace(s) - 2.0 * np.sum(p * s) + np.sum((p @ p) * s))
        dw = self.decoder @ w
        return float(np.trace(s) - 2.0 * np.sum(dw.T * s) + np.sum((dw.T @ dw) * s))

    def gradient(self, w, matrix: Optional[np.ndarray] = None) -> np.ndarray:
        w = self._check(w)
        s = self.reference if matrix is None else matrix
        if self.kind in CONTRASTIVE_KINDS:
            return -2.0 * w @ s + 2.0 * self.spec.lam * w @ (w.T @ w)
        if self.decoder is None:
            p = w.T @ w
            return -4.0 * w @ s + 2.0 * w @ (p @ s + s @ p)
        gram = self.decoder.T @ self.decoder
        return -2.0 * self.decoder.T @ s + 2.0 * gram @ w @ s


def eval_loss(spec: LossSpec, w, data: LossData) -> float:
    """Loss value; under the resample policy this is the expectation over masks."""
    return LossObjective(spec, data).value(w)


def loss_gradient(spec: LossSpec, w, data: LossData) -> np.ndarray:
    return LossObjective(spec, data).gradient(w)


def finite_diff_gradient(spec: LossSpec, w, data: LossData, h: float = 1e-5) -> np.ndarray:
    """Central differences of eval_loss, entry by entry."""
    if h <= 0:
        raise ContractError(f"h must be positive, got {h}")
    objective = LossObjective(spec, data)
    w = np.array(w, dtype=float)
    grad = np.zeros_like(w)
    for index in np.ndindex(*w.shape):
        original = w[index]
        w[index] = original + h
        upper = objective.value(w)
        w[index] = original - h
        lower = objective.value(w)
        w[index] = original
        grad[index] = (upper - lower) / (2.0 * h)
    return grad


def closed_form_minimizer(spec: LossSpec, data: LossData, r: int) -> np.ndarray:
    """Spectral minimizer of the reference loss as an r x d matrix."""
    objective = LossObjective(spec, data)
    if objective.kind in AUTOENCODER_KINDS and objective.decoder is not None:
        return np.linalg.pinv(objective.decoder)
    eigen = top_r_eigenbasis(objective.reference, r)
    if objective.kind in AUTOENCODER_KINDS:
        return eigen.basis.T.copy()
    weights = np.sqrt(np.clip(eigen.eigvals, 0.0, None) / spec.lam)
    return weights[:, None] * eigen.basis.T
