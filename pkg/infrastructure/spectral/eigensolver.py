"""Top-r eigenspaces of symmetric target matrices."""
import logging
from typing import Union

import numpy as np
import scipy.linalg

from domain.errors import DimensionError, NumericError
from domain.models import EigenBasis, Representation, SymTarget

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
TIE_TOL = 1e-10


def _as_matrix(t: Union[SymTarget, np.ndarray]) -> np.ndarray:
    return t.m if isinstance(t, SymTarget) else np.asarray(t, dtype=float)


def top_r_eigenbasis(t: Union[SymTarget, np.ndarray], r: int) -> EigenBasis:
    """Eigenvectors of the r algebraically largest eigenvalues, descending.

    Each eigenvector is signed so that its largest-magnitude entry is
    positive. A tie between the r-th and (r+1)-th eigenvalue is flagged in
    the result rather than raised.
    """
    m = _as_matrix(t)
    d = m.shape[0]
    if not 1 <= r <= d:
        raise DimensionError(f"need 1 <= r <= d, got r={r}, d={d}")
    if not np.all(np.isfinite(m)):
        raise NumericError("target matrix has non-finite entries", {"shape": m.shape})
    lower = max(d - r - 1, 0)
    try:
        eigvals, vectors = scipy.linalg.eigh(m, subset_by_index=[lower, d - 1])
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericError(f"eigensolver failed: {e}", {"shape": m.shape}) from e

    eigvals, vectors = eigvals[::-1], vectors[:, ::-1]
    top_vals, basis = eigvals[:r], vectors[:, :r]
    pivots = np.argmax(np.abs(basis), axis=0)
    signs = np.where(basis[pivots, np.arange(r)] < 0, -1.0, 1.0)
    basis = basis * signs

    scale = scipy.linalg.norm(m, 2)
    residuals = np.linalg.norm(m @ basis - basis * top_vals, axis=0)
    if np.any(residuals > RESIDUAL_TOL * max(scale, np.finfo(float).tiny)):
        raise NumericError(
            "eigenpair residual above tolerance",
            {"residuals": residuals.tolist(), "norm": scale},
        )

    gap = float(top_vals[-1] - eigvals[r]) if r < d else float("inf")
    ties = gap <= TIE_TOL * max(1.0, scale)
    if ties:
        logger.warning(f"Eigenvalues {r} and {r + 1} tie (gap {gap:.3e}); subspace is not unique")
    return EigenBasis(basis=basis, eigvals=top_vals, ties=ties, gap=gap)


def representation_from(t: Union[SymTarget, np.ndarray], r: int) -> Representation:
    """W = diag(sqrt(max(lambda_i, 0))) U^T with its subspace U."""
    eigen = top_r_eigenbasis(t, r)
    clipped = bool(eigen.eigvals[-1] <= 0)
    if clipped:
        logger.warning(f"lambda_r = {eigen.eigvals[-1]:.3e} <= 0; singular values clipped at zero")
    singular_values = np.sqrt(np.clip(eigen.eigvals, 0.0, None))
    return Representation(
        w=singular_values[:, None] * eigen.basis.T,
        u=eigen.basis,
        singular_values=singular_values,
        clipped=clipped,
        ties=eigen.ties,
    )
