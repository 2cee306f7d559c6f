from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from domain.models.arrays import frozen_array

UNIT_TOL = 1e-12


class Link(str, Enum):
    """Link function of the binary response model."""
    LOGISTIC = "logistic"
    PROBIT = "probit"


class TaskSpec(BaseModel):
    """Downstream task on the latent coordinates."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    w_star: np.ndarray
    sigma_eps: float = 0.0
    link: Link = Link.LOGISTIC

    @field_validator("w_star", mode="before")
    @classmethod
    def _unit(cls, value):
        w = frozen_array(value, 1, "w_star")
        if abs(np.linalg.norm(w) - 1.0) > UNIT_TOL:
            raise ValueError(f"w_star must be a unit vector, got norm {np.linalg.norm(w)}")
        return w

    @field_validator("sigma_eps")
    @classmethod
    def _noise(cls, value):
        if value < 0:
            raise ValueError("sigma_eps must be nonnegative")
        return value
