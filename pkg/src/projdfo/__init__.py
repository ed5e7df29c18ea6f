"""Derivative-free trust-region optimization over projectable convex sets.

The top level re-exports the working surface: regions and projections,
the model subproblem, interpolation geometry, the solver itself, the
least-squares problem suite, and the benchmark harness. Submodules stay
importable directly for the less common entry points.
"""

from .regions import (
    ConvexRegion,
    ball,
    box,
    contains,
    halfspace,
    intersection,
    load_region,
    project,
    region_from_config,
    region_to_config,
    whole_space,
)
from .subproblem import (
    FistaSettings,
    QuadraticModel,
    criticality_measure,
    solve_trust_region,
)
from .geometry import (
    InterpolationSet,
    build_linear_model,
    improve_geometry,
    initial_feasible_set,
    poisedness_constant,
)
from .solver import SolveResult, SolverConfig, format_trace, solve
from .problems import (
    EvaluationLedger,
    LeastSquaresProblem,
    NoiseSpec,
    by_name,
    constraint_variants,
    evaluate,
    suite,
)
from .bench import (
    BenchRecord,
    bench_instance,
    evals_to_solve,
    performance_profile,
    read_records,
    run_benchmark,
    write_profile,
    write_records,
)

__version__ = "0.1.0"

__all__ = [
    "ConvexRegion",
    "ball",
    "box",
    "contains",
    "halfspace",
    "intersection",
    "load_region",
    "project",
    "region_from_config",
    "region_to_config",
    "whole_space",
    "FistaSettings",
    "QuadraticModel",
    "criticality_measure",
    "solve_trust_region",
    "InterpolationSet",
    "build_linear_model",
    "improve_geometry",
    "initial_feasible_set",
    "poisedness_constant",
    "SolveResult",
    "SolverConfig",
    "format_trace",
    "solve",
    "EvaluationLedger",
    "LeastSquaresProblem",
    "NoiseSpec",
    "by_name",
    "constraint_variants",
    "evaluate",
    "suite",
    "BenchRecord",
    "bench_instance",
    "evals_to_solve",
    "performance_profile",
    "read_records",
    "run_benchmark",
    "write_profile",
    "write_records",
]
