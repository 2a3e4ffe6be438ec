"""Differentially private dual gradient tracking for distributed resource
allocation over directed communication graphs.

The library covers the full pipeline: directed mixing graphs and their
spectral quantities, box-constrained quadratic allocation problems and
their duals, geometric step/noise schedules with condition checking,
the private tracking iteration plus its conventional baseline, coupled
adjacent executions, and the cumulative privacy-budget accountant.
"""
from .graph import (
    CommGraph,
    RootCheck,
    SpectralData,
    build_uniform_weights,
    check_common_root,
    perron_vectors,
    spectral_analysis,
)
from .problem import (
    AdjacencyPerturbation,
    AllocationProblem,
    QuadraticBoxCost,
    centralized_solve,
    conjugate_argmin,
    dual_gradient,
    dual_value,
    make_adjacent,
    primal_cost,
)
from .schedules import (
    CHANNEL_XI,
    CHANNEL_ZETA,
    ConditionVerdict,
    GeometricSchedule,
    NoiseStreams,
    ScheduleSet,
    check_conditions,
    laplace_sample,
    partial_sum,
    tail_sums,
)
from .solver import (
    BaselineState,
    CoupledResult,
    IterationRecord,
    RunTrace,
    SolverState,
    TraceMetrics,
    coupled_adjacent_run,
    ddgt_baseline_step,
    dpdgt_step,
    run,
)
from .privacy import (
    PrivacyReport,
    SensitivityTrajectory,
    d_eta_bound,
    epsilon_budget,
    epsilon_closed_form,
    sensitivity_dynamics,
)
from .presets import (
    GENERATOR_BUSES,
    IEEE14_DEMANDS,
    IEEE14_GENERATORS,
    comparison_schedules,
    ieee14_graph,
    ieee14_links,
    ieee14_problem,
    ieee14_schedules,
)
from .config import (
    RunConfig,
    build_graph,
    build_problem,
    build_schedules,
    default_config,
    parse_config,
    serialize_config,
)
from .harness import (
    CompareResult,
    SweepResult,
    compare,
    paired_one_sided,
    privacy_report,
    replicate_seed,
    run_once,
    solve_report,
    sweep,
    write_compare_outputs,
    write_run_csv,
    write_run_summary,
    write_sweep_outputs,
)

__version__ = "0.1.0"
