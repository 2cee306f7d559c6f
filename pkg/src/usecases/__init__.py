from src.usecases.solver_registry import Problem, SolverRegistry
from src.usecases.experiment_usecase import ExperimentUseCase, build_problem, run_work_item
from src.usecases.validation_usecase import ValidationUseCase, oracle_instance

__all__ = [
    "Problem", "SolverRegistry", "ExperimentUseCase", "build_problem", "run_work_item",
    "ValidationUseCase", "oracle_instance",
]
