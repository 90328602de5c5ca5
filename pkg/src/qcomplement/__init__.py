"""Cloning and deleting machines, their correlation content, and audits of closed forms."""
__version__ = "0.1.0"

from .correlations import (
    average_discord,
    bipartite_discord_multi,
    bloch_decompose,
    correlation_report,
    discord,
    entropy,
    geometric_discord,
    geometric_discord_oracle,
    negativity,
)
from .errors import DomainError, UnsupportedSizeError
from .machines import (
    MachineParams,
    PipelineSpec,
    alpha_from_fdel,
    bh_clone,
    clone1N_then_deleteNM,
    clone_then_delete,
    delete_2to1,
    delete_then_clone,
    deleteN1_then_clone1M,
    gm_clone,
    run_pipeline,
)
from .measurements import MeasurementBasis, OptimizerConfig
from .paper_formulas import FormulaId, FormulaValue, delta_clone, delta_composite, delta_delete, f3_from_xi
from .qmat import DensityMatrix, QubitState, partial_trace, partial_transpose, tensor, validate_density

__all__ = [
    "DensityMatrix", "DomainError", "FormulaId", "FormulaValue", "MachineParams",
    "MeasurementBasis", "OptimizerConfig", "PipelineSpec", "QubitState", "UnsupportedSizeError",
    "alpha_from_fdel", "average_discord", "bh_clone", "bipartite_discord_multi", "bloch_decompose",
    "clone1N_then_deleteNM", "clone_then_delete", "correlation_report", "delete_2to1",
    "delete_then_clone", "deleteN1_then_clone1M", "delta_clone", "delta_composite", "delta_delete",
    "discord", "entropy", "f3_from_xi", "geometric_discord", "geometric_discord_oracle", "gm_clone",
    "negativity", "partial_trace", "partial_transpose", "run_pipeline", "tensor", "validate_density",
]
