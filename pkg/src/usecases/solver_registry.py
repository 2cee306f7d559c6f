import logging
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from domain.errors import ContractError
from domain.models import (
    EigenBasis,
    GDConfig,
    LossData,
    LossKind,
    LossSpec,
    MaskPolicy,
    SolverName,
    SpikedModel,
    SymTarget,
    TaskData,
    TaskSpec,
)
from infrastructure.optim import minimize, random_init
from infrastructure.spectral import (
    masked_ae_matrix,
    masking_expectation_matrix,
    pca_matrix,
    supcon_hybrid_matrix,
    top_r_eigenbasis,
    transfer_hybrid_matrix,
)

logger = logging.getLogger(__name__)

Eigensolver = Callable[[SymTarget, int], EigenBasis]


class Problem(BaseModel):
    """Data of one work item: what the solvers see plus the ground truth."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    r: int
    u_star: np.ndarray
    x_unlab: Optional[np.ndarray] = None
    class_blocks: List[np.ndarray] = []
    tasks: List[TaskData] = []
    model: Optional[SpikedModel] = None
    task: Optional[TaskSpec] = None
    seed: int = 0


class SolverRegistry:
    """Fits each named solver on a problem and returns its d x r subspace."""

    def __init__(self, eigensolver: Eigensolver = top_r_eigenbasis, lam: float = 1.0, gd_iters: int = 10000):
        self.eigensolver = eigensolver
        self.lam = lam
        self.gd_iters = gd_iters
        self._solvers: Dict[SolverName, Callable[[Problem, Optional[float]], np.ndarray]] = {
            SolverName.CL_MASKING: self._cl_masking,
            SolverName.CL_GD: self._cl_gd,
            SolverName.AUTOENCODER: self._autoencoder,
            SolverName.MASKED_AE: self._masked_ae,
            SolverName.SUPCON: self._supcon,
            SolverName.TRANSFER: self._transfer,
        }

    def fit(self, solver: SolverName, problem: Problem, alpha: Optional[float] = None) -> np.ndarray:
        return self._solvers[SolverName(solver)](problem, alpha)

    def _subspace(self, target: SymTarget, r: int) -> np.ndarray:
        return np.array(self.eigensolver(target, r).basis)

    @staticmethod
    def _unlabeled(problem: Problem) -> np.ndarray:
        if problem.x_unlab is None:
            raise ContractError("solver needs an unlabeled sample")
        return problem.x_unlab

    def _cl_masking(self, problem: Problem, alpha: Optional[float]) -> np.ndarray:
        return self._subspace(masking_expectation_matrix(self._unlabeled(problem)), problem.r)

    def _autoencoder(self, problem: Problem, alpha: Optional[float]) -> np.ndarray:
        return self._subspace(pca_matrix(self._unlabeled(problem)), problem.r)

    def _masked_ae(self, problem: Problem, alpha: Optional[float]) -> np.ndarray:
        return self._subspace(masked_ae_matrix(self._unlabeled(problem)), problem.r)

    def _cl_gd(self, problem: Problem, alpha: Optional[float]) -> np.ndarray:
        x = self._unlabeled(problem)
        spec = LossSpec(kind=LossKind.SELFCON, lam=self.lam, mask_policy=MaskPolicy.RESAMPLE)
        result = minimize(
            spec,
            LossData(x=x),
            random_init(problem.r, x.shape[0], problem.seed),
            GDConfig(max_iters=self.gd_iters, seed=problem.seed),
        )
        _, _, right = np.linalg.svd(result.w, full_matrices=False)
        return right.T

    def _supcon(self, problem: Problem, alpha: Optional[float]) -> np.ndarray:
        if not problem.class_blocks:
            raise ContractError("supcon needs labeled class blocks")
        weights = [1.0 if alpha is None or np.isinf(alpha) else alpha] * len(problem.class_blocks)
        unlabeled = None if alpha is None or np.isinf(alpha) else problem.x_unlab
        return self._subspace(supcon_hybrid_matrix(unlabeled, problem.class_blocks, weights), problem.r)

    def _transfer(self, problem: Problem, alpha: Optional[float]) -> np.ndarray:
        if alpha is None:
            raise ContractError("transfer needs a task weight")
        weights = [alpha] * len(problem.tasks)
        return self._subspace(transfer_hybrid_matrix(self._unlabeled(problem), problem.tasks, weights), problem.r)
