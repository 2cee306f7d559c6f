from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from domain.models.arrays import frozen_array
from domain.models.mask import DiagMask


class LossKind(str, Enum):
    """Objective families the optimizer understands."""
    SELFCON = "selfcon"
    SUPCON_HYBRID = "supcon-hybrid"
    HSIC_TRANSFER = "hsic-transfer"
    AUTOENCODER = "autoencoder"
    MASKED_AUTOENCODER = "masked-autoencoder"


class MaskPolicy(str, Enum):
    """How masking augmentations enter the loss."""
    FIXED = "fixed"
    RESAMPLE = "resample"
    EXPECTED = "expected"


class LossSpec(BaseModel):
    """Which loss to evaluate and with which weights."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: LossKind
    lam: float = Field(1.0, alias="lambda", gt=0)
    alpha: Tuple[float, ...] = ()
    mask_policy: MaskPolicy = MaskPolicy.EXPECTED
    masks: Tuple[DiagMask, ...] = ()

    @field_validator("alpha")
    @classmethod
    def _alpha(cls, value):
        if any(a < 0 for a in value):
            raise ValueError("alpha entries must be nonnegative")
        return value

    @model_validator(mode="after")
    def _check(self):
        if self.mask_policy == MaskPolicy.FIXED and not self.masks:
            raise ValueError("fixed mask policy needs at least one mask")
        return self


class GDConfig(BaseModel):
    """Plain gradient descent settings; step_size None selects 1e-2 / ||S||_2."""
    step_size: Optional[float] = Field(None, gt=0)
    max_iters: int = Field(10000, ge=1)
    grad_tol: float = Field(1e-10, ge=0)
    seed: int = 0
    divergence_threshold: float = 1e12


class TaskData(BaseModel):
    """Labeled source-task sample (x_hat: d x m, y: length m)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x_hat: np.ndarray
    y: np.ndarray

    @field_validator("x_hat", mode="before")
    @classmethod
    def _x(cls, value):
        return frozen_array(value, 2, "x_hat")

    @field_validator("y", mode="before")
    @classmethod
    def _y(cls, value):
        return frozen_array(value, 1, "y")

    @model_validator(mode="after")
    def _check(self):
        if self.y.shape[0] != self.x_hat.shape[1]:
            raise ValueError("one label per column of x_hat is required")
        return self


class LossData(BaseModel):
    """Data bundle for a loss.

    ``x`` is the unlabeled (or autoencoder) sample, ``views`` an explicit
    augmentation pair, ``class_blocks`` the labeled supervised blocks,
    ``tasks`` the transfer source tasks, and ``decoder`` a fixed d x r
    decoder for the autoencoder kinds (tied weights when absent).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: Optional[np.ndarray] = None
    views: Optional[Tuple[np.ndarray, np.ndarray]] = None
    class_blocks: List[np.ndarray] = []
    tasks: List[TaskData] = []
    decoder: Optional[np.ndarray] = None

    @field_validator("x", "decoder", mode="before")
    @classmethod
    def _optional_matrix(cls, value, info):
        return None if value is None else frozen_array(value, 2, info.field_name)

    @field_validator("views", mode="before")
    @classmethod
    def _views(cls, value):
        if value is None:
            return None
        x1, x2 = value
        return frozen_array(x1, 2, "x1"), frozen_array(x2, 2, "x2")

    @field_validator("class_blocks", mode="before")
    @classmethod
    def _blocks(cls, value):
        return [frozen_array(block, 2, "class block") for block in value]


class GDResult(BaseModel):
    """Outcome of a gradient descent run."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    w: np.ndarray
    trace: np.ndarray
    iterations: int
    converged: bool
    grad_norm: float
    step_size: float
