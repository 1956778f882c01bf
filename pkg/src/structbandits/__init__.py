"""Structured stochastic bandits: instance-specific exploration lower
bounds and the rate-matching policy that tracks them.

The package has two halves.  ``bound_solver`` computes, for a known
structure and parameter, the minimal per-arm exploration rates and the
resulting asymptotic regret constant.  ``algorithms`` and ``harness``
play the matching policy (and baselines) against simulated instances
and record regret trajectories.

Hot loops run on a compiled kernel when the extension built, and on a
pure-Python twin otherwise; both produce bit-identical results.  Set
``STRUCTBANDITS_FORCE_PURE=1`` to force the fallback.
"""

from ._backend import BACKEND_NAME, get_backend
from .algorithms import (
    GlmUcbPolicy,
    KlUcbPolicy,
    LinThompsonPolicy,
    OssbConfig,
    OssbPolicy,
    PhaseTag,
    StaticAllocationPolicy,
    klucb_index,
)
from .bound_solver import (
    BoundSolution,
    BoundSolverError,
    LinearCutCache,
    MaxIterationsError,
    SolveOptions,
    solve,
    solve_classical,
    solve_dueling,
    solve_generic_oracle,
    solve_linear,
    solve_lipschitz,
    solve_unimodal,
)
from .core import (
    BERNOULLI,
    GAUSSIAN,
    InvalidMeanError,
    ObservationModel,
    ParameterVector,
    RngStream,
    bernoulli_model,
    gaussian_model,
    kl_div,
)
from .harness import (
    AggregateResult,
    BanditInstance,
    PolicySpec,
    RegretTrace,
    aggregate_traces,
    default_checkpoints,
    generate_classical_instance,
    generate_dueling_instance,
    generate_linear_instance,
    generate_lipschitz_instance,
    generate_unimodal_instance,
    read_aggregate_csv,
    run_episode,
    run_monte_carlo,
    write_aggregate_csv,
    write_traces_csv,
)
from .lp import LpError, LpInfeasibleError, LpResult, minimize_covering
from .structures import (
    CLASSICAL,
    DUELING,
    LINEAR,
    LIPSCHITZ,
    UNIMODAL,
    NoCondorcetWinnerError,
    RankDeficientError,
    StructureModel,
    classical_structure,
    condorcet_winner,
    dueling_structure,
    gap_vector,
    is_unimodal,
    linear_structure,
    lipschitz_structure,
    lipschitz_violation,
    optimal_arm,
    project_to_structure,
    reward,
    unimodal_structure,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND_NAME",
    "get_backend",
    # observation models
    "BERNOULLI",
    "GAUSSIAN",
    "InvalidMeanError",
    "ObservationModel",
    "ParameterVector",
    "RngStream",
    "bernoulli_model",
    "gaussian_model",
    "kl_div",
    # structures
    "CLASSICAL",
    "LINEAR",
    "LIPSCHITZ",
    "UNIMODAL",
    "DUELING",
    "NoCondorcetWinnerError",
    "RankDeficientError",
    "StructureModel",
    "classical_structure",
    "linear_structure",
    "lipschitz_structure",
    "unimodal_structure",
    "dueling_structure",
    "condorcet_winner",
    "gap_vector",
    "is_unimodal",
    "lipschitz_violation",
    "optimal_arm",
    "project_to_structure",
    "reward",
    # lower bound solvers
    "BoundSolution",
    "BoundSolverError",
    "LinearCutCache",
    "MaxIterationsError",
    "SolveOptions",
    "solve",
    "solve_classical",
    "solve_dueling",
    "solve_generic_oracle",
    "solve_linear",
    "solve_lipschitz",
    "solve_unimodal",
    # linear programming
    "LpError",
    "LpInfeasibleError",
    "LpResult",
    "minimize_covering",
    # policies
    "GlmUcbPolicy",
    "KlUcbPolicy",
    "LinThompsonPolicy",
    "OssbConfig",
    "OssbPolicy",
    "PhaseTag",
    "StaticAllocationPolicy",
    "klucb_index",
    # harness
    "AggregateResult",
    "BanditInstance",
    "PolicySpec",
    "RegretTrace",
    "aggregate_traces",
    "default_checkpoints",
    "generate_classical_instance",
    "generate_dueling_instance",
    "generate_linear_instance",
    "generate_lipschitz_instance",
    "generate_unimodal_instance",
    "read_aggregate_csv",
    "run_episode",
    "run_monte_carlo",
    "write_aggregate_csv",
    "write_traces_csv",
]
