import logging
import time
from itertools import product
from typing import Callable, List, Tuple

import numpy as np

from domain.errors import ContractError, LabError
from domain.models import (
    GDConfig,
    LossData,
    LossKind,
    LossSpec,
    NoiseProfile,
    NormKind,
    PropertyVerdict,
    SymTarget,
    TaskData,
    TaskSpec,
    ValidationReport,
)
from infrastructure.metrics import (
    incoherence,
    monte_carlo_regression_risk,
    optimal_probe_weight,
    probe_risk,
    regression_excess_risk,
    sin_theta,
)
from infrastructure.optim import LossObjective, finite_diff_gradient, loss_gradient, minimize, random_init
from infrastructure.sampling import (
    derive_seed,
    make_mixture_model,
    make_spiked_model,
    sample_mixture,
    sample_regression_task,
    sample_spiked,
    sample_task_vectors,
    sample_uniform_orthobasis,
    sample_unit_vector,
)
from infrastructure.spectral import (
    augmented_pair_matrix,
    masked_ae_matrix,
    masking_expectation_matrix,
    pca_matrix,
    split_diagonal,
    supcon_hybrid_matrix,
    top_r_eigenbasis,
    transfer_hybrid_matrix,
)
from src.usecases.solver_registry import Eigensolver

logger = logging.getLogger(__name__)

AXIOM_TRIALS = 1000
DELTA_TRIALS = 1000
ORACLE_INSTANCES = 10
MC_INSTANCES = 5
MC_SAMPLES = 1_000_000
MC_TOLERANCE = 3.0
GD_STEP_FACTOR = 0.05
GD_ITERS = 10000
GD_TOLERANCE = 1e-3
FD_TOLERANCE = 1e-5
MIN_RELATIVE_GAP = 0.05
MAX_INSTANCE_ATTEMPTS = 50

# small, well-separated instances for the optimizer oracle
ORACLE_D, ORACLE_R, ORACLE_N = 8, 2, 60

Check = Callable[[int], Tuple[bool, str]]


def _target_for(kind: LossKind, data: LossData, spec: LossSpec) -> SymTarget:
    """Closed-form target whose top eigenvectors minimize the loss."""
    if kind == LossKind.SELFCON:
        return masking_expectation_matrix(data.x)
    if kind == LossKind.SUPCON_HYBRID:
        return supcon_hybrid_matrix(data.x, data.class_blocks, spec.alpha)
    if kind == LossKind.HSIC_TRANSFER:
        return transfer_hybrid_matrix(data.x, data.tasks, spec.alpha)
    if kind == LossKind.AUTOENCODER:
        return pca_matrix(data.x)
    return masked_ae_matrix(data.x)


def _draw_instance(kind: LossKind, seed: int) -> Tuple[LossSpec, LossData]:
    model = make_spiked_model(
        ORACLE_D, ORACLE_R, 3.0, 0.5, derive_seed(seed, 0), profile=NoiseProfile.HOMOSKEDASTIC
    )
    x = np.array(sample_spiked(model, ORACLE_N, derive_seed(seed, 1)).x)
    if kind == LossKind.SUPCON_HYBRID:
        gmm = make_mixture_model(
            ORACLE_D, ORACLE_R, 3.0, 0.5, derive_seed(seed, 0), profile=NoiseProfile.HOMOSKEDASTIC
        )
        labeled = sample_mixture(gmm, [10] * gmm.k, derive_seed(seed, 2))
        unlabeled = sample_mixture(gmm, [ORACLE_N // gmm.k] * gmm.k, derive_seed(seed, 1))
        spec = LossSpec(kind=kind, alpha=(1.0,) * gmm.k)
        return spec, LossData(x=unlabeled.x, class_blocks=labeled.blocks(gmm.k))
    if kind == LossKind.HSIC_TRANSFER:
        vectors = sample_task_vectors(ORACLE_R, ORACLE_R, derive_seed(seed, 2))
        tasks = []
        for index, w_t in enumerate(vectors):
            x_hat, y, _ = sample_regression_task(model, w_t, 20, derive_seed(seed, 3, index))
            tasks.append(TaskData(x_hat=x_hat, y=y))
        return LossSpec(kind=kind, alpha=(1.0,) * len(tasks)), LossData(x=x, tasks=tasks)
    return LossSpec(kind=kind), LossData(x=x)


def oracle_instance(kind: LossKind, seed: int) -> Tuple[LossSpec, LossData, SymTarget]:
    """A small instance whose target has positive top eigenvalues and a clear gap.

    Seeds are redrawn until lambda_r > 0 and lambda_r - lambda_(r+1) is at
    least MIN_RELATIVE_GAP of |lambda_1|.
    """
    kind = LossKind(kind)
    for attempt in range(MAX_INSTANCE_ATTEMPTS):
        spec, data = _draw_instance(kind, derive_seed(seed, attempt))
        target = _target_for(kind, data, spec)
        eigvals = np.linalg.eigvalsh(target.m)[::-1]
        gap = eigvals[ORACLE_R - 1] - eigvals[ORACLE_R]
        if eigvals[ORACLE_R - 1] > 0 and gap >= MIN_RELATIVE_GAP * abs(eigvals[0]):
            return spec, data, target
        logger.debug(f"Redrawing {kind.value} instance (attempt {attempt + 1}, gap {gap:.3e})")
    raise ContractError(f"no well-separated {kind.value} instance within {MAX_INSTANCE_ATTEMPTS} draws")


class ValidationUseCase:
    """Runs the property suites and reports one verdict per property."""

    def __init__(self, eigensolver: Eigensolver = top_r_eigenbasis):
        self.eigensolver = eigensolver
        self.properties: List[Tuple[str, Check]] = [
            ("sin-theta-axioms", self.check_sin_theta_axioms),
            ("incoherence-bound", self.check_incoherence_bound),
            ("mask-expectation-identity", self.check_mask_expectation),
            ("delta-norm-bound", self.check_delta_norm),
            ("target-symmetry-scale", self.check_target_symmetry),
            ("gradient-check", self.check_gradients),
            ("gd-spectral-equivalence", self.check_gd_equivalence),
            ("risk-closed-form-vs-mc", self.check_risk_monte_carlo),
            ("excess-risk-identifiability", self.check_excess_identifiability),
        ]

    def validate_suite(self, seed: int = 0) -> ValidationReport:
        verdicts = []
        for index, (name, check) in enumerate(self.properties):
            started = time.perf_counter()
            try:
                passed, detail = check(derive_seed(seed, index))
            except (LabError, ArithmeticError, ValueError) as e:
                logger.exception(f"Property {name} raised")
                passed, detail = False, f"{type(e).__name__}: {e}"
            elapsed = (time.perf_counter() - started) * 1000.0
            logger.info(f"{name}: {'PASS' if passed else 'FAIL'} ({elapsed:.0f} ms) {detail}")
            verdicts.append(PropertyVerdict(name=name, passed=bool(passed), detail=detail, wall_time_ms=elapsed))
        return ValidationReport(seed=seed, verdicts=verdicts)

    # -- subspace metrics ----------------------------------------------

    def check_sin_theta_axioms(self, seed: int) -> Tuple[bool, str]:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for trial in range(AXIOM_TRIALS):
            d = int(rng.integers(3, 9))
            r = int(rng.integers(1, d))
            a, b, c = (sample_uniform_orthobasis(d, r, derive_seed(seed, trial, k)) for k in range(3))
            rotation = sample_uniform_orthobasis(r, r, derive_seed(seed, trial, 3))
            ab, ba = sin_theta(a, b).value, sin_theta(b, a).value
            ac, bc = sin_theta(a, c).value, sin_theta(b, c).value
            violations = (
                abs(ab - ba),
                max(0.0, ab - np.sqrt(r)),
                max(0.0, ac - ab - bc),
                abs(sin_theta(a @ rotation, b).value - ab),
                sin_theta(a, a @ rotation).value,
                max(0.0, sin_theta(a, b, NormKind.SPECTRAL).value - 1.0),
            )
            worst = max(worst, *violations)
        return worst <= 1e-6, f"worst violation {worst:.2e} over {AXIOM_TRIALS} trials"

    def check_incoherence_bound(self, seed: int) -> Tuple[bool, str]:
        d, r = 40, 5
        values = [incoherence(sample_uniform_orthobasis(d, r, derive_seed(seed, k))) for k in range(200)]
        bound = 10.0 * r / d * np.log(d)
        mean = float(np.mean(values))
        return mean <= bound, f"mean incoherence {mean:.4f} vs bound {bound:.4f}"

    # -- spectral targets ----------------------------------------------

    def check_mask_expectation(self, seed: int) -> Tuple[bool, str]:
        worst = 0.0
        for d in (4, 6, 8):
            x = np.random.default_rng(derive_seed(seed, d)).standard_normal((d, 12))
            total = np.zeros((d, d))
            for bits in product((0.0, 1.0), repeat=d):
                mask = np.array(bits)[:, None]
                total += augmented_pair_matrix(mask * x, (1.0 - mask) * x).m
            average = total / 2 ** d
            worst = max(worst, float(np.linalg.norm(average - 0.5 * masking_expectation_matrix(x).m)))
        return worst <= 1e-10, f"max Frobenius deviation {worst:.2e}"

    def check_delta_norm(self, seed: int) -> Tuple[bool, str]:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(DELTA_TRIALS):
            d = int(rng.integers(2, 16))
            g = rng.standard_normal((d, d))
            m = g + g.T
            _, off_diagonal = split_diagonal(m)
            worst = max(worst, np.linalg.norm(off_diagonal, 2) / np.linalg.norm(m, 2))
        return worst <= 2.0 + 1e-12, f"max ||Delta(M)|| / ||M|| = {worst:.4f}"

    def check_target_symmetry(self, seed: int) -> Tuple[bool, str]:
        x = np.random.default_rng(seed).standard_normal((10, 30))
        worst = 0.0
        for build in (masking_expectation_matrix, pca_matrix, masked_ae_matrix):
            base = build(x).m
            scaled = build(3.0 * x).m
            worst = max(
                worst,
                float(np.max(np.abs(base - base.T))),
                float(np.max(np.abs(scaled - 9.0 * base)) / max(np.max(np.abs(base)), 1.0)),
            )
        return worst <= 1e-10, f"max asymmetry or scale deviation {worst:.2e}"

    # -- optimizer oracle ----------------------------------------------

    def check_gradients(self, seed: int) -> Tuple[bool, str]:
        worst = 0.0
        for index, kind in enumerate(LossKind):
            spec, data, _ = oracle_instance(kind, derive_seed(seed, index))
            w = random_init(ORACLE_R, ORACLE_D, derive_seed(seed, index, 1))
            analytic = loss_gradient(spec, w, data)
            numeric = finite_diff_gradient(spec, w, data)
            worst = max(worst, float(np.linalg.norm(analytic - numeric) / np.linalg.norm(analytic)))
        decoder = np.random.default_rng(seed).standard_normal((ORACLE_D, ORACLE_R))
        spec, data, _ = oracle_instance(LossKind.AUTOENCODER, seed)
        data = data.model_copy(update={"decoder": decoder})
        w = random_init(ORACLE_R, ORACLE_D, derive_seed(seed, 99))
        analytic = loss_gradient(spec, w, data)
        worst = max(
            worst,
            float(np.linalg.norm(analytic - finite_diff_gradient(spec, w, data)) / np.linalg.norm(analytic)),
        )
        return worst <= FD_TOLERANCE, f"max relative gradient error {worst:.2e}"

    def check_gd_equivalence(self, seed: int) -> Tuple[bool, str]:
        worst, worst_kind = 0.0, ""
        for index, kind in enumerate(LossKind):
            for instance in range(ORACLE_INSTANCES):
                spec, data, target = oracle_instance(kind, derive_seed(seed, index, instance))
                step = GD_STEP_FACTOR / LossObjective(spec, data).scale()
                result = minimize(
                    spec,
                    data,
                    random_init(ORACLE_R, ORACLE_D, derive_seed(seed, index, instance, 1)),
                    GDConfig(step_size=step, max_iters=GD_ITERS, grad_tol=1e-14),
                )
                _, _, right = np.linalg.svd(result.w, full_matrices=False)
                basis = np.array(self.eigensolver(target, ORACLE_R).basis)
                distance = sin_theta(right.T, basis).value
                if distance > worst:
                    worst, worst_kind = distance, kind.value
        detail = f"max sin-theta {worst:.2e}" + (f" ({worst_kind})" if worst_kind else "")
        return worst <= GD_TOLERANCE, detail

    # -- downstream risk -----------------------------------------------

    def check_risk_monte_carlo(self, seed: int) -> Tuple[bool, str]:
        worst = 0.0
        for instance in range(MC_INSTANCES):
            model = make_spiked_model(10, 2, 1.0, 1.0, derive_seed(seed, instance, 0))
            task = TaskSpec(w_star=sample_unit_vector(2, derive_seed(seed, instance, 1)), sigma_eps=0.1)
            u = sample_uniform_orthobasis(10, 2, derive_seed(seed, instance, 2))
            w = optimal_probe_weight(u, model, task)
            closed = probe_risk(u, model, task, w)
            mean, stderr = monte_carlo_regression_risk(
                u, model, task, w, MC_SAMPLES, derive_seed(seed, instance, 3)
            )
            worst = max(worst, abs(mean - closed) / stderr)
        return worst <= MC_TOLERANCE, f"max |closed form - MC| = {worst:.2f} standard errors"

    def check_excess_identifiability(self, seed: int) -> Tuple[bool, str]:
        worst_star, worst_negative = 0.0, 0.0
        for instance in range(20):
            model = make_spiked_model(
                12, 3, 1.0, 1.5, derive_seed(seed, instance, 0), profile=NoiseProfile.HOMOSKEDASTIC
            )
            task = TaskSpec(w_star=sample_unit_vector(3, derive_seed(seed, instance, 1)))
            worst_star = max(worst_star, abs(regression_excess_risk(model.u_star, model, task).excess_risk))
            u = sample_uniform_orthobasis(12, 3, derive_seed(seed, instance, 2))
            worst_negative = max(worst_negative, -regression_excess_risk(u, model, task).excess_risk)
        passed = worst_star <= 1e-10 and worst_negative <= 1e-10
        return passed, f"|excess(U*)| <= {worst_star:.2e}, most negative excess {-worst_negative:.2e}"
