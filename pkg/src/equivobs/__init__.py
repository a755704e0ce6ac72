"""Equivariant observers for second order kinematics on matrix Lie groups."""

from .lie import GROUPS, SE2, SE3, SO3, ManifoldError, MatrixLieGroup, get_group, load_group
from .observer import ObserverState, estimate, innovation, lyapunov, lyapunov_rate
from .sim import ScenarioConfig, lissajous_input, run_scenario
from .symmetry import (
    InputVelocity,
    OriginPoint,
    State,
    SymmetryElement,
    SymmetryVelocity,
    input_action,
    sdp_compose,
    sdp_inverse,
    state_action,
    transitive_solve,
)
from .system import dynamics, lift
from .verify import verify_suite

__version__ = "0.1.0"
