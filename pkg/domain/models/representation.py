from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from domain.models.arrays import frozen_array


class Provenance(str, Enum):
    """Formula that produced a target matrix."""
    SELFCON_AUGPAIR = "selfcon-augpair"
    SELFCON_MASKING = "selfcon-masking"
    PCA = "pca"
    MASKED_AE = "masked-ae"
    SUPCON_HYBRID = "supcon-hybrid"
    HSIC = "hsic"
    TRANSFER_HYBRID = "transfer-hybrid"


class SymTarget(BaseModel):
    """Symmetric d x d matrix whose top-r eigenspace is a closed-form solution."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    m: np.ndarray
    provenance: Provenance

    @field_validator("m", mode="before")
    @classmethod
    def _symmetrize(cls, value):
        m = np.array(value, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"target must be square, got shape {m.shape}")
        return frozen_array((m + m.T) / 2.0, 2, "m")

    @property
    def d(self) -> int:
        return self.m.shape[0]


class EigenBasis(BaseModel):
    """Top-r eigenpairs, eigenvalues descending."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: np.ndarray
    eigvals: np.ndarray
    ties: bool = False
    gap: float = float("inf")

    @field_validator("basis", mode="before")
    @classmethod
    def _basis(cls, value):
        return frozen_array(value, 2, "basis")

    @field_validator("eigvals", mode="before")
    @classmethod
    def _eigvals(cls, value):
        return frozen_array(value, 1, "eigvals")


class Representation(BaseModel):
    """Learned r x d map W with its right-singular subspace U."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    w: np.ndarray
    u: np.ndarray
    singular_values: np.ndarray
    clipped: bool = False
    ties: bool = False

    @field_validator("w", "u", mode="before")
    @classmethod
    def _matrix(cls, value, info):
        return frozen_array(value, 2, info.field_name)

    @field_validator("singular_values", mode="before")
    @classmethod
    def _values(cls, value):
        return frozen_array(value, 1, "singular_values")

    @model_validator(mode="after")
    def _check(self):
        r, d = self.w.shape
        if self.u.shape != (d, r):
            raise ValueError(f"u must be {d} x {r}, got {self.u.shape}")
        if np.any(self.singular_values < 0):
            raise ValueError("singular values must be nonnegative")
        if np.max(np.abs(self.u.T @ self.u - np.eye(r))) > 1e-10:
            raise ValueError("u must be orthonormal")
        return self

    @property
    def r(self) -> int:
        return self.w.shape[0]
