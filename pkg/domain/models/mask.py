import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator


class DiagMask(BaseModel):
    """Diagonal 0/1 mask A splitting coordinates into two views."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bits: np.ndarray

    @field_validator("bits", mode="before")
    @classmethod
    def _bits(cls, value):
        bits = np.array(value, dtype=np.int8)
        if bits.ndim != 1 or not np.all((bits == 0) | (bits == 1)):
            raise ValueError("bits must be a 0/1 vector")
        bits.setflags(write=False)
        return bits

    @property
    def d(self) -> int:
        return self.bits.shape[0]

    def complement(self) -> "DiagMask":
        return DiagMask(bits=1 - self.bits)

    def matrix(self) -> np.ndarray:
        return np.diag(self.bits.astype(float))

    def apply(self, x: np.ndarray) -> np.ndarray:
        """A x for a vector or a d x n matrix."""
        weights = self.bits.astype(float)
        return x * (weights[:, None] if np.ndim(x) == 2 else weights)
