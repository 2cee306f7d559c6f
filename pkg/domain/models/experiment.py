import math
from enum import Enum
from typing import Any, Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from domain.models.task import Link


class ExperimentKind(str, Enum):
    RECOVER_SWEEP_D = "recover-sweep-d"
    RECOVER_SWEEP_N = "recover-sweep-n"
    TRANSFER_SWEEP_ALPHA = "transfer-sweep-alpha"
    SUPCON_SWEEP_M = "supcon-sweep-m"
    VALIDATE = "validate"


class SolverName(str, Enum):
    CL_MASKING = "cl-masking"
    CL_GD = "cl-gd"
    AUTOENCODER = "autoencoder"
    MASKED_AE = "masked-ae"
    SUPCON = "supcon"
    TRANSFER = "transfer"


class RiskKind(str, Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"


class ProbeMode(str, Enum):
    """Population-optimal probe, or least squares refit on fresh labels."""
    POPULATION = "population"
    REFIT = "refit"


class NoiseProfile(str, Enum):
    HOMOSKEDASTIC = "homoskedastic"
    STEPPED = "stepped"


class SignalSupport(str, Enum):
    """Coordinates the signal basis may occupy.

    ``quiet`` keeps U* on the coordinates at the lowest noise level, where
    the noise is isotropic and U* stays the best rank-r representation.
    """
    QUIET = "quiet"
    FULL = "full"


_COMMON: Dict[str, Any] = {
    "nu": 1.0,
    "sigma": 2.0,
    "replicates": 20,
    "seed": 0,
}

PRESETS: Dict[ExperimentKind, Dict[str, Any]] = {
    ExperimentKind.RECOVER_SWEEP_D: {
        **_COMMON, "r": 5, "n": 20000, "d_grid": [20, 40, 80],
        "solvers": ["cl-masking", "autoencoder"],
    },
    ExperimentKind.RECOVER_SWEEP_N: {
        **_COMMON, "r": 5, "d": 40, "n_grid": [2000, 8000, 20000],
        "solvers": ["cl-masking", "autoencoder"],
    },
    ExperimentKind.TRANSFER_SWEEP_ALPHA: {
        **_COMMON, "r": 10, "d": 20, "n": 1000, "m": 1000, "t": 8,
        "sigma": 1.5, "noise_profile": "homoskedastic",
        "alpha_grid": [math.exp(k) for k in range(-5, 6)],
        "solvers": ["transfer"],
    },
    ExperimentKind.SUPCON_SWEEP_M: {
        **_COMMON, "r": 5, "d": 40, "n": 20000, "m_grid": [500, 2000, 8000],
        "alpha_grid": [math.inf], "solvers": ["supcon", "cl-masking"],
    },
    ExperimentKind.VALIDATE: {"seed": 0},
}

_SWEEPS: Dict[ExperimentKind, Tuple[str, str]] = {
    ExperimentKind.RECOVER_SWEEP_D: ("d", "d_grid"),
    ExperimentKind.RECOVER_SWEEP_N: ("n", "n_grid"),
    ExperimentKind.TRANSFER_SWEEP_ALPHA: ("log_alpha", "alpha_grid"),
    ExperimentKind.SUPCON_SWEEP_M: ("m", "m_grid"),
}


class ExperimentConfig(BaseModel):
    """Declarative description of one sweep."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: ExperimentKind
    d: int = Field(40, ge=2)
    n: int = Field(20000, ge=0)
    m: int = Field(1000, ge=2)
    t: int = Field(8, ge=0)
    r: int = Field(5, ge=1)
    d_grid: List[int] = []
    n_grid: List[int] = []
    m_grid: List[int] = []
    alpha_grid: List[float] = []
    nu: float = Field(1.0, gt=0)
    sigma: Union[float, List[float]] = 2.0
    noise_profile: NoiseProfile = NoiseProfile.STEPPED
    signal_support: SignalSupport = SignalSupport.QUIET
    kappa: float = Field(16.0, ge=1)
    sigma_eps: float = Field(0.0, ge=0)
    lam: float = Field(1.0, gt=0)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    replicates: int = Field(20, ge=1)
    solvers: List[SolverName] = []
    gd_iters: int = Field(10000, ge=1)
    risk: RiskKind = RiskKind.REGRESSION
    link: Link = Link.LOGISTIC
    n_mc: int = Field(100000, ge=10000)
    probe: ProbeMode = ProbeMode.POPULATION
    output_path: str = "results"
    n_jobs: int = 1
    record_timing: bool = False

    @field_validator("alpha_grid")
    @classmethod
    def _alpha(cls, value):
        if any(not a > 0 for a in value):
            raise ValueError("alpha_grid entries must be positive")
        return value

    @model_validator(mode="after")
    def _check(self):
        if self.experiment == ExperimentKind.VALIDATE:
            return self
        _, grid_field = _SWEEPS[self.experiment]
        if not getattr(self, grid_field):
            raise ValueError(f"{grid_field} must be nonempty for {self.experiment.value}")
        if not self.solvers:
            raise ValueError("at least one solver is required")
        if isinstance(self.sigma, list):
            if self.experiment == ExperimentKind.RECOVER_SWEEP_D:
                raise ValueError("a sigma vector cannot be combined with a sweep over d")
            if len(self.sigma) != self.d:
                raise ValueError(f"sigma vector must have length d={self.d}")
        dims = self.d_grid if self.experiment == ExperimentKind.RECOVER_SWEEP_D else [self.d]
        if any(self.r >= d for d in dims):
            raise ValueError(f"r={self.r} must be smaller than every d")
        for d in dims:
            quiet = self._quiet_coordinates(d)
            if self.signal_support == SignalSupport.FULL and quiet < d:
                raise ValueError("full signal support needs homoskedastic noise")
            if quiet < self.r:
                raise ValueError(f"d={d} has {quiet} coordinates at the lowest noise level, fewer than r={self.r}")
        return self

    def _quiet_coordinates(self, d: int) -> int:
        if isinstance(self.sigma, list):
            low = min(self.sigma)
            return sum(1 for s in self.sigma if math.isclose(s, low, rel_tol=1e-12))
        if self.noise_profile == NoiseProfile.STEPPED and self.kappa > 1 and self.sigma > 0:
            return d - self.r
        return d

    @classmethod
    def for_experiment(cls, experiment: Union[str, ExperimentKind], **overrides) -> "ExperimentConfig":
        """Preset defaults for the experiment kind, updated with overrides."""
        kind = ExperimentKind(experiment)
        values = {**PRESETS[kind], **{k: v for k, v in overrides.items() if v is not None}}
        values["experiment"] = kind
        return cls(**values)

    def sweep(self) -> Tuple[str, List[float]]:
        """Name of the swept variable and the values reported for it."""
        name, grid_field = _SWEEPS[self.experiment]
        grid = getattr(self, grid_field)
        if name == "log_alpha":
            return name, [math.log(a) for a in grid]
        return name, list(grid)

    @property
    def sweeps_data_size(self) -> bool:
        return self.experiment != ExperimentKind.TRANSFER_SWEEP_ALPHA


class ResultRow(BaseModel):
    """One CSV record: a solver at a grid point for one replicate."""
    experiment: str
    solver: str
    sweep_var: str
    sweep_value: float
    replicate: int
    seed: int
    sin_theta_f: float
    excess_risk: float
    stderr: float
    wall_time_ms: float
    error: str = ""


class PropertyVerdict(BaseModel):
    """Outcome of one validation property."""
    name: str
    passed: bool
    detail: str = ""
    wall_time_ms: float = 0.0


class ValidationReport(BaseModel):
    seed: int
    verdicts: List[PropertyVerdict]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def failed_names(self) -> List[str]:
        return [v.name for v in self.verdicts if not v.passed]
