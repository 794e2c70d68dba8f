"""Concurrence dynamics of two atoms in separate vacuum cavities."""

from ._core import (
    EsdError,
    NumericalError,
    SystemParams,
    ValidationError,
    coefficient_set,
    concurrence_general,
    concurrence_x,
    cross_validation,
    evaluate_kernels,
    figure_ids,
    figure_scenario,
    initial_state,
    jc_concurrence,
    run_engine,
    run_scenario,
    transfer_matrices,
)

__version__ = "0.1.0"

__all__ = [
    "EsdError",
    "NumericalError",
    "SystemParams",
    "ValidationError",
    "coefficient_set",
    "concurrence_general",
    "concurrence_x",
    "cross_validation",
    "evaluate_kernels",
    "figure_ids",
    "figure_scenario",
    "initial_state",
    "jc_concurrence",
    "run_engine",
    "run_scenario",
    "transfer_matrices",
]
