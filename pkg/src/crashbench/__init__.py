"""crashbench: scalable crashworthiness shape-optimization benchmarks.

Typical scripted use mirrors the CLI and HTTP service exactly::

    import crashbench as cb

    problem = cb.create_problem(1, dim=4)          # star box, d=4
    result = cb.evaluate(problem, [0.0, 0.0, 0.0, 0.0])
    result.raw[cb.ObjectiveKind.PENALIZED_SEA]
"""

__version__ = "0.1.0"

from .errors import CrashBenchError
from .problems import (
    DEFAULT_OBJECTIVES,
    EvaluationResult,
    ObjectiveKind,
    ProblemId,
    ProblemInstance,
    SolverMode,
    bounds_for,
    create_problem,
    denormalize,
    evaluate,
    load_uniformity,
    normalize,
    penalized_mass,
    penalized_sea,
    sea,
)

__all__ = [
    "CrashBenchError",
    "DEFAULT_OBJECTIVES",
    "EvaluationResult",
    "ObjectiveKind",
    "ProblemId",
    "ProblemInstance",
    "SolverMode",
    "bounds_for",
    "create_problem",
    "denormalize",
    "evaluate",
    "load_uniformity",
    "normalize",
    "penalized_mass",
    "penalized_sea",
    "sea",
    "__version__",
]
