import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from domain.models.arrays import frozen_array

ORTHONORMAL_TOL = 1e-12


class SpikedModel(BaseModel):
    """Spiked covariance model x = U* z + xi with diagonal noise."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    u_star: np.ndarray
    nu: float
    sigma: np.ndarray

    @field_validator("u_star", mode="before")
    @classmethod
    def _basis(cls, value):
        return frozen_array(value, 2, "u_star")

    @field_validator("sigma", mode="before")
    @classmethod
    def _noise(cls, value):
        return frozen_array(value, 1, "sigma")

    @model_validator(mode="after")
    def _check(self):
        d, r = self.u_star.shape
        if not 1 <= r < d:
            raise ValueError(f"need 1 <= r < d, got d={d}, r={r}")
        if self.sigma.shape != (d,):
            raise ValueError(f"sigma must have length {d}, got {self.sigma.shape[0]}")
        if self.nu < 0 or np.any(self.sigma < 0):
            raise ValueError("nu and sigma must be nonnegative")
        deviation = np.max(np.abs(self.u_star.T @ self.u_star - np.eye(r)))
        if deviation > ORTHONORMAL_TOL:
            raise ValueError(f"u_star is not orthonormal (max deviation {deviation:.3e})")
        return self

    @property
    def d(self) -> int:
        return self.u_star.shape[0]

    @property
    def r(self) -> int:
        return self.u_star.shape[1]

    @property
    def kappa(self) -> float:
        """sigma_(1)^2 / sigma_(d)^2; infinite when some coordinate is noiseless."""
        smallest = float(np.min(self.sigma)) ** 2
        return float(np.max(self.sigma)) ** 2 / smallest if smallest > 0 else float("inf")

    @property
    def rho(self) -> float:
        """Signal-to-noise ratio nu / sigma_(1)."""
        largest = float(np.max(self.sigma))
        return self.nu / largest if largest > 0 else float("inf")

    def covariance(self) -> np.ndarray:
        return self.nu ** 2 * self.u_star @ self.u_star.T + np.diag(self.sigma ** 2)


class SampleBatch(BaseModel):
    """Observations together with the latents and noise that produced them."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray
    z: np.ndarray
    xi: np.ndarray
    seed: int

    @field_validator("x", "z", "xi", mode="before")
    @classmethod
    def _matrix(cls, value, info):
        return frozen_array(value, 2, info.field_name)

    @model_validator(mode="after")
    def _check(self):
        if self.x.shape != self.xi.shape or self.z.shape[1] != self.x.shape[1]:
            raise ValueError(
                f"inconsistent shapes x={self.x.shape}, z={self.z.shape}, xi={self.xi.shape}"
            )
        return self

    @property
    def n(self) -> int:
        return self.x.shape[1]
