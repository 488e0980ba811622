"""Guaranteed-winning pursuit of goal-seeking evaders above a guarded
half-plane: geometry, strategies, certificates, matching and simulation."""

from .certificates import (
    AdjustBound,
    Certificate,
    CertificateKind,
    KKTReconstructionError,
    ParamRegion,
    RegionLabel,
    RelaxedSolution,
    adjust_scope_holds,
    adjust_time_bound,
    certify_win,
    classify_region,
    curvature_demand,
    curvature_demand_bound,
    heading_adjust_ratio,
    adjust_feasible,
    intercept_feasible,
    relaxation_sextic,
    relaxed_clearance_from_centers,
    relaxed_clearance_oracle,
    relaxed_oracle_from_centers,
    rollout_clearance_oracle,
    sample_adjust_feasible_state,
    solve_relaxed_clearance,
    two_step_feasible,
)
from .geometry import (
    IO_TOL,
    Circle,
    InterceptionData,
    er_goal_distance,
    evasion_region,
    heading_error,
    interception,
    orientation_holds,
    potential,
    separation_holds,
)
from .matching import Assignment, WinGraph, assign, build_graph, max_matching
from .model import (
    EvaderSpec,
    EvaderState,
    GameParams,
    JointState,
    PursuerSpec,
    PursuerState,
    Scenario,
    goal_value,
    step_evader,
    step_pursuer,
    validate_scenario,
    wrap_angle,
    wrap_to_pi,
)
from .numerics import BracketedMax, Polynomial, golden_max, max_on_circle, real_roots
from .sim import Event, SimConfig, SimResult, detect_crossing, run
from .strategies import (
    ClampDiagnostics,
    InterceptGains,
    Phase,
    TwoStepState,
    evader_constant,
    evader_optimal,
    evader_random_goal,
    heading_adjust,
    intercept_gains,
    pursuit_intercept,
    pursuit_simple,
    two_step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
