from ._core import (
    MiceConfig,
    MiceError,
    MiceEstimator,
    QuadraticProblem,
    RosenbrockProblem,
    ShiftedQuadraticProblem,
    StochasticProblem,
    run_config,
    step_size_strongly_convex,
)

__all__ = [
    "MiceConfig",
    "MiceError",
    "MiceEstimator",
    "QuadraticProblem",
    "RosenbrockProblem",
    "ShiftedQuadraticProblem",
    "StochasticProblem",
    "run_config",
    "step_size_strongly_convex",
]
