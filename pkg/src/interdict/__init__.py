"""Exact solver suite for min-cost selection under budgeted interdiction.

Five compact MILP formulations of the robust selection problem, an in-repo
simplex + branch-and-bound engine, independent DP/enumeration oracles,
deterministic instance generators, and a benchmark harness with
performance-profile output.
"""

from .bench import (
    DominanceTable,
    ProfileCurve,
    RunRecord,
    performance_profile,
    run_lb_experiment,
    run_timing_experiment,
)
from .core import (
    AttackResult,
    InputError,
    Instance,
    Provenance,
    SchemaError,
    Selection,
    instance_from_json,
    instance_to_json,
    min_attack_weight,
    phi,
    robust_feasible,
)
from .instgen import (
    GenSpec,
    PartitionSpec,
    from_partition,
    generate,
    load_instance,
    save_instance,
)
from .milp import (
    LpResult,
    MilpResult,
    SolveLimits,
    SolverError,
    export,
    solve_bb,
    solve_lp,
)
from .models import (
    FORMULATIONS,
    AssumptionViolation,
    ExtractionError,
    MilpModel,
    SizeReport,
    UnsupportedFormulation,
    build_model,
    extract_selection,
    model_size,
    phi_lambda_lp,
)
from .oracle import CapacityError, ExactResult, phi_enum, solve_dp, solve_enum

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolation",
    "AttackResult",
    "CapacityError",
    "DominanceTable",
    "ExactResult",
    "ExtractionError",
    "FORMULATIONS",
    "GenSpec",
    "InputError",
    "Instance",
    "LpResult",
    "MilpModel",
    "MilpResult",
    "PartitionSpec",
    "ProfileCurve",
    "Provenance",
    "RunRecord",
    "SchemaError",
    "Selection",
    "SizeReport",
    "SolveLimits",
    "SolverError",
    "UnsupportedFormulation",
    "build_model",
    "export",
    "extract_selection",
    "from_partition",
    "generate",
    "instance_from_json",
    "instance_to_json",
    "load_instance",
    "min_attack_weight",
    "model_size",
    "performance_profile",
    "phi",
    "phi_enum",
    "phi_lambda_lp",
    "robust_feasible",
    "run_lb_experiment",
    "run_timing_experiment",
    "save_instance",
    "solve_bb",
    "solve_dp",
    "solve_enum",
    "solve_lp",
]
