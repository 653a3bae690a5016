"""Cellular-automata-inspired optimizer (CCAA) with benchmark, design and IIR problems."""

from .core import (
    Bounds,
    CcaaConfig,
    ContractError,
    EvaluationError,
    Population,
    Problem,
    SmartCell,
    clamp,
    derive_seed,
    make_rng,
)
from .optimizer import RunRecord, ccaa_run, ccaa_run_budgeted

__all__ = [
    "Bounds",
    "CcaaConfig",
    "ContractError",
    "EvaluationError",
    "Population",
    "Problem",
    "RunRecord",
    "SmartCell",
    "ccaa_run",
    "ccaa_run_budgeted",
    "clamp",
    "derive_seed",
    "make_rng",
]

__version__ = "0.1.0"
