"""Fractional-order optimal dosing for a cancer-obesity model."""

from .errors import (
    ConfigError,
    MarginalCase,
    NonConvergence,
    NonexistentEquilibrium,
    ParseError,
    SingularSystem,
    SweepNotConverged,
    ValidationError,
)
from .fracops import (
    L1Stencil,
    build_stencil,
    caputo_left,
    caputo_left_split,
    caputo_right,
    caputo_right_split,
)
from .model import (
    C1_DEFAULT,
    C2_DEFAULT,
    FAT_COUPLING_DEFAULT,
    AdjointPoint,
    ControlPoint,
    ModelParams,
    ProvenanceWarning,
    StatePoint,
    adjoint_rhs,
    cost_integrand,
    default_params,
    state_jacobian,
    state_rhs,
)
from .optimizer import (
    OptimalSolution,
    Scenario,
    SweepConfig,
    default_initial_controls,
    evaluate_cost,
    forward_backward_sweep,
    project_controls,
    scenario_controls,
    stationarity_gap,
)
from .solver import NewtonConfig, solve_adjoint, solve_state, state_residuals
from .trajectories import AdjointTrajectory, ControlSchedule, Grid, StateTrajectory

__version__ = "0.1.0"

#: Initial state of the reference scenario (T0, I0, F0, D10, D20).
DEFAULT_X0 = StatePoint(2.0, 0.1, 1.0, 0.5, 0.5)

from .batch import (  # noqa: E402
    CSV_HEADER,
    CellResult,
    SweepResult,
    emit_equilibrium_report,
    emit_trajectory_csv,
    run_sweep,
)
from .config import RunConfig, format_config, parse_config  # noqa: E402
