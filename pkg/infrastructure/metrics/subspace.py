import numpy as np

from domain.errors import ContractError
from domain.models import NormKind, SubspaceDistance

ORTHONORMAL_TOL = 1e-8


def check_orthonormal(u: np.ndarray, name: str = "u") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[1] > u.shape[0]:
        raise ContractError(f"{name} must be a tall d x r matrix, got shape {u.shape}")
    deviation = float(np.max(np.abs(u.T @ u - np.eye(u.shape[1]))))
    if deviation > ORTHONORMAL_TOL:
        raise ContractError(f"{name} is not orthonormal (max deviation {deviation:.3e})")
    return u


def sin_theta(u1, u2, norm: NormKind = NormKind.FROBENIUS) -> SubspaceDistance:
    """sin-theta distance between col(u1) and col(u2)."""
    u1, u2 = check_orthonormal(u1, "u1"), check_orthonormal(u2, "u2")
    if u1.shape != u2.shape:
        raise ContractError(f"bases must have equal shapes, got {u1.shape} and {u2.shape}")
    r = u1.shape[1]
    overlap = u1.T @ u2
    if NormKind(norm) == NormKind.SPECTRAL:
        value = float(np.linalg.norm(u2 - u1 @ overlap, 2))
        return SubspaceDistance(value=min(value, 1.0), norm=NormKind.SPECTRAL)
    value = float(np.sqrt(max(0.0, r - np.sum(overlap ** 2))))
    return SubspaceDistance(value=min(value, np.sqrt(r)), norm=NormKind.FROBENIUS)


def projector_distance(u1, u2) -> float:
    """(1/sqrt 2) ||u1 u1^T - u2 u2^T||_F, equal to the Frobenius sin-theta distance."""
    u1, u2 = check_orthonormal(u1, "u1"), check_orthonormal(u2, "u2")
    return float(np.linalg.norm(u1 @ u1.T - u2 @ u2.T) / np.sqrt(2.0))


def incoherence(u) -> float:
    """max_i ||e_i^T u||^2."""
    u = check_orthonormal(u)
    return float(np.max(np.sum(u ** 2, axis=1)))
