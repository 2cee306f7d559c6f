from infrastructure.optim.losses import (
    LossObjective,
    closed_form_minimizer,
    eval_loss,
    finite_diff_gradient,
    loss_gradient,
)
from infrastructure.optim.gradient_descent import minimize, random_init

__all__ = [
    "LossObjective", "closed_form_minimizer", "eval_loss", "finite_diff_gradient",
    "loss_gradient", "minimize", "random_init",
]
