"""Time-optimal motion on SE(2) for a car that drives forward and turns in place."""

from .errors import ContractViolation, IntegrationError, NoConvergence
from .se2 import IDENTITY, Pose, compose, inverse, normalize_angle, relative_target
from .vertical import (
    Branch,
    Control,
    Covector,
    EllipticArcParams,
    branch_of,
    casimir_E,
    elliptic_arc_params,
    elliptic_switch_time,
    elliptic_vertical_flow,
    extremal_control,
    hamiltonian_H,
    rotation_switch_time,
    rotation_vertical_flow,
)
from .expmap import ExtremalSegment, Trajectory, arclength, end_state, evaluate, exp_map, sample_trajectory
from .oracle import OracleState, integrate_pmp, integrate_pmp_arrays, trajectory_distance
from .planner import (
    CylinderPoint,
    FeasiblePlan,
    ShootingSolution,
    SolverConfig,
    SrezkaResult,
    feasible_plan,
    has_optimal_structure,
    optimal_trajectory,
    plan_trajectory,
    shooting_residual,
    solve_bvp,
    srezka_improve,
)

__version__ = "0.1.0"
