"""Trotter-Suzuki product formulas for disordered Heisenberg chains, with
CMA-ES optimization of the decomposition coefficients."""

from .model import ChainInstance, LocalTerm, OrderingMode, Pauli, TermKind, TermOrdering
from .trotter import CoefficientVector, DecompositionSpec, suzuki_coefficient, suzuki_seed
from .fitness import FitnessContext, error_reduction_pct, evaluate, exact_propagator
from .cmaes import CmaRunResult, cma_run

__version__ = "0.1.0"

__all__ = [
    "ChainInstance",
    "CmaRunResult",
    "CoefficientVector",
    "DecompositionSpec",
    "FitnessContext",
    "LocalTerm",
    "OrderingMode",
    "Pauli",
    "TermKind",
    "TermOrdering",
    "cma_run",
    "error_reduction_pct",
    "evaluate",
    "exact_propagator",
    "suzuki_coefficient",
    "suzuki_seed",
    "__version__",
]
