"""Exception hierarchy for the lab.

Every error derives from ``LabError`` and from the builtin that best matches
its meaning, so callers can catch either.
"""
from typing import Dict, Optional


class LabError(Exception):
    """Base class for all lab errors."""


class DimensionError(LabError, ValueError):
    """Shapes or sizes do not fit the operation."""


class ContrastDegeneracyError(LabError, ValueError):
    """Too few samples to form the negative-pair average."""


class WithinClassContrastError(ContrastDegeneracyError):
    """A class block has fewer than two samples."""


class NoNegativesError(ContrastDegeneracyError):
    """Fewer than two classes, so there are no negative classes."""


class CenteringDegeneracyError(ContrastDegeneracyError):
    """Centering needs at least two samples."""


class ContractError(LabError, ValueError):
    """An input violates a documented precondition."""


class SingularityError(LabError, ArithmeticError):
    """A linear system that must be solved is singular."""


class NumericError(LabError, ArithmeticError):
    """A numerical routine failed; carries diagnostics."""

    def __init__(self, message: str, diagnostics: Optional[Dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class StepSizeError(LabError, ArithmeticError):
    """Gradient descent diverged."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


class ZeroScaleError(LabError, ZeroDivisionError):
    """A scale parameter that divides is zero."""


class ConfigError(LabError, ValueError):
    """Invalid experiment or process configuration."""


class OutputError(LabError, OSError):
    """Results could not be written."""
