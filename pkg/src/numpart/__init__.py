"""Exact and anytime solvers for two-way number partitioning."""
from .core import (
    CardinalityConstraint,
    ImprovementEvent,
    InputError,
    Instance,
    ParityError,
    PartitionAssignment,
    SolveReport,
    Status,
    WeightedElement,
    evaluate,
    total_and_parity,
)
from .heuristics import HeuristicKind, bldm, ldm, pdm
from .search import DecisionPath, SearchLimits, cbldm_solve, ckk_solve, extract_assignment

__version__ = "0.1.0"
