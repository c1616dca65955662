"""Evolution of cooperation under costly punishment with threat signalling.

Infinite-population selection dynamics, analytic finite-population payoffs
for conditional strategies, and a seeded agent-based evolutionary
simulation with parameter-sweep tooling and CSV output.
"""

__version__ = "0.1.0"

from .abm import (
    AbmConfig,
    GenerationRecord,
    RunSummary,
    compute_metrics,
    fermi_probability,
    generation_step,
    init_population,
    run_simulation,
    strategy_fitness,
)
from .experiments import (
    SweepRow,
    SweepSpec,
    aggregate,
    axis_points,
    derive_run_seed,
    run_sweep,
)
from .finite_payoffs import (
    OracleResult,
    matrix_avg_payoffs,
    sequential_oracle,
    threat_avg_payoffs,
)
from .games import (
    COOPERATIVE_TAGS,
    GameParams,
    ParamError,
    Variant,
    payoff_matrix,
    validate_params,
)
from .replicator import (
    PhaseSample,
    RestPoint,
    Trajectory,
    avg_payoffs,
    classify_rest_point,
    closed_form_rest_points,
    gradient,
    integrate,
    mean_fitness,
    numeric_rest_points,
    phase_grid,
    simplex_lattice,
)

__all__ = [
    "AbmConfig",
    "COOPERATIVE_TAGS",
    "GameParams",
    "GenerationRecord",
    "OracleResult",
    "ParamError",
    "PhaseSample",
    "RestPoint",
    "RunSummary",
    "SweepRow",
    "SweepSpec",
    "Trajectory",
    "Variant",
    "aggregate",
    "avg_payoffs",
    "axis_points",
    "classify_rest_point",
    "closed_form_rest_points",
    "compute_metrics",
    "derive_run_seed",
    "fermi_probability",
    "generation_step",
    "gradient",
    "init_population",
    "integrate",
    "matrix_avg_payoffs",
    "mean_fitness",
    "numeric_rest_points",
    "payoff_matrix",
    "phase_grid",
    "run_simulation",
    "run_sweep",
    "sequential_oracle",
    "simplex_lattice",
    "strategy_fitness",
    "threat_avg_payoffs",
    "validate_params",
]
