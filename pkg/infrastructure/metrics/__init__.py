from infrastructure.metrics.subspace import check_orthonormal, incoherence, projector_distance, sin_theta
from infrastructure.metrics.risk import (
    classification_direction,
    classification_risk,
    classification_risk_for_weight,
    fit_probe,
    monte_carlo_regression_risk,
    optimal_probe_weight,
    probe_risk,
    regression_excess_risk,
    regression_risk_for_weight,
)

__all__ = [
    "check_orthonormal", "incoherence", "projector_distance", "sin_theta",
    "classification_direction", "classification_risk", "classification_risk_for_weight",
    "fit_probe", "monte_carlo_regression_risk", "optimal_probe_weight", "probe_risk",
    "regression_excess_risk", "regression_risk_for_weight",
]
