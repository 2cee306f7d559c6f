import numpy as np


def frozen_array(value, ndim: int, name: str) -> np.ndarray:
    """Coerce to a read-only float array with the given number of dimensions."""
    array = np.array(value, dtype=float)
    if array.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    array.setflags(write=False)
    return array
