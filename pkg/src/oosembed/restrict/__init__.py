"""Restricted-reconstruction out-of-sample embedding."""

from .batch import BatchProblem, BatchResult, batch_gradient, batch_hessian, batch_objective, solve_batch
from .problem import (
    EmbeddingResult,
    OosProblem,
    RidgePoint,
    RidgeSystem,
    objective,
    objective_gradient,
    r_hat_squared,
    ridge_solve,
)
from .single import ArcTrace, arc, solve_single
from .stress import stress_oos, stress_value

__all__ = [
    "ArcTrace",
    "BatchProblem",
    "BatchResult",
    "EmbeddingResult",
    "OosProblem",
    "RidgePoint",
    "RidgeSystem",
    "arc",
    "batch_gradient",
    "batch_hessian",
    "batch_objective",
    "objective",
    "objective_gradient",
    "r_hat_squared",
    "ridge_solve",
    "solve_batch",
    "solve_single",
    "stress_oos",
    "stress_value",
]
