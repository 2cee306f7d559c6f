from domain.models.spiked_model import SpikedModel, SampleBatch
from domain.models.mixture import MixtureModel, LabeledBatch
from domain.models.task import Link, TaskSpec
from domain.models.mask import DiagMask
from domain.models.representation import Provenance, SymTarget, EigenBasis, Representation
from domain.models.loss import (
    LossKind,
    MaskPolicy,
    LossSpec,
    GDConfig,
    GDResult,
    LossData,
    TaskData,
)
from domain.models.metrics import NormKind, SubspaceDistance, RiskReport
from domain.models.experiment import (
    ExperimentKind,
    SolverName,
    RiskKind,
    ProbeMode,
    NoiseProfile,
    SignalSupport,
    ExperimentConfig,
    ResultRow,
    PropertyVerdict,
    ValidationReport,
)

__all__ = [
    "SpikedModel", "SampleBatch", "MixtureModel", "LabeledBatch", "Link", "TaskSpec",
    "DiagMask", "Provenance", "SymTarget", "EigenBasis", "Representation",
    "LossKind", "MaskPolicy", "LossSpec", "GDConfig", "GDResult", "LossData", "TaskData",
    "NormKind", "SubspaceDistance", "RiskReport",
    "ExperimentKind", "SolverName", "RiskKind", "ProbeMode", "NoiseProfile", "SignalSupport",
    "ExperimentConfig", "ResultRow", "PropertyVerdict", "ValidationReport",
]
