from enum import Enum

from pydantic import BaseModel, Field


class NormKind(str, Enum):
    FROBENIUS = "frobenius"
    SPECTRAL = "spectral"


class SubspaceDistance(BaseModel):
    """sin-theta distance between two r-dimensional subspaces."""
    value: float = Field(ge=0)
    norm: NormKind = NormKind.FROBENIUS


class RiskReport(BaseModel):
    """Downstream risk of a representation and its excess over U*."""
    absolute_risk: float
    excess_risk: float
    optimal_risk: float
    stderr: float = Field(0.0, ge=0)
    n_mc: int = Field(0, ge=0)
