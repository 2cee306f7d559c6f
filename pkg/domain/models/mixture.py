from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from domain.models.arrays import frozen_array

CONSTRAINT_TOL = 1e-10


class MixtureModel(BaseModel):
    """Gaussian mixture with K = r + 1 classes and diagonal class covariances.

    ``means`` and ``covs`` are stored row-wise (K x d); ``covs`` holds the
    diagonal variances of each class.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    means: np.ndarray
    covs: np.ndarray
    probs: np.ndarray

    @field_validator("means", "covs", mode="before")
    @classmethod
    def _rows(cls, value, info):
        return frozen_array(value, 2, info.field_name)

    @field_validator("probs", mode="before")
    @classmethod
    def _probs(cls, value):
        return frozen_array(value, 1, "probs")

    @model_validator(mode="after")
    def _check(self):
        k, d = self.means.shape
        if k < 2 or k - 1 >= d:
            raise ValueError(f"need 2 <= K <= d, got K={k}, d={d}")
        if self.covs.shape != (k, d) or self.probs.shape != (k,):
            raise ValueError("covs and probs must match the number of classes")
        if np.any(self.covs < 0) or np.any(self.probs < 0):
            raise ValueError("covs and probs must be nonnegative")
        if abs(self.probs.sum() - 1.0) > CONSTRAINT_TOL:
            raise ValueError(f"probs must sum to 1, got {self.probs.sum()}")
        norms = np.linalg.norm(self.means, axis=1)
        scale = max(1.0, float(norms.max()))
        if np.linalg.norm(self.probs @ self.means) > CONSTRAINT_TOL * scale:
            raise ValueError("weighted class means must sum to zero")
        if np.max(norms) - np.min(norms) > CONSTRAINT_TOL * scale:
            raise ValueError("class means must share a common norm")
        eigvals = np.linalg.eigvalsh(self.signal_matrix())
        if eigvals[-self.r] <= CONSTRAINT_TOL * scale ** 2:
            raise ValueError("class means do not span an r-dimensional subspace")
        return self

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def r(self) -> int:
        return self.means.shape[0] - 1

    @property
    def d(self) -> int:
        return self.means.shape[1]

    @property
    def nu(self) -> float:
        """Signal scale implied by ||mu_k|| = sqrt(r) nu."""
        return float(np.linalg.norm(self.means[0])) / np.sqrt(self.r)

    def signal_matrix(self) -> np.ndarray:
        """Lambda = sum_k p_k mu_k mu_k^T."""
        return (self.means.T * self.probs) @ self.means

    def signal_basis(self) -> np.ndarray:
        """Orthonormal basis (d x r) of the span of the class means."""
        _, vectors = np.linalg.eigh(self.signal_matrix())
        return vectors[:, ::-1][:, : self.r]


class LabeledBatch(BaseModel):
    """Mixture samples stacked column-wise with aligned class labels."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray
    labels: np.ndarray
    seed: int

    @field_validator("x", mode="before")
    @classmethod
    def _x(cls, value):
        return frozen_array(value, 2, "x")

    @field_validator("labels", mode="before")
    @classmethod
    def _labels(cls, value):
        labels = np.array(value, dtype=int)
        labels.setflags(write=False)
        return labels

    @model_validator(mode="after")
    def _check(self):
        if self.labels.shape != (self.x.shape[1],):
            raise ValueError("one label per column is required")
        return self

    def blocks(self, k: int) -> List[np.ndarray]:
        """Per-class column blocks, in class order."""
        return [self.x[:, self.labels == label] for label in range(k)]
