"""Two-phase traffic flow with an autonomous-vehicle moving flux constraint.

Exact wave-front tracking for the 2x2 two-phase macroscopic model coupled
with the ODE of a controlled vehicle that caps the flux at its position.
"""

from .constrained import ConstrainedSolution, check_consistency, solve_constrained
from .diagnostics import (
    ConvergenceReport,
    Profile,
    convergence_study,
    l1_distance,
    verify_ledger,
)
from .model import HypothesisViolation, ModelParams, State, default_params, validate_params
from .riemann import Wave, WaveFan, discretize_rarefactions, solve_riemann
from .scenario import Scenario, build_sim, parse_scenario, random_scenario, to_json
from .tracker import (
    ControlFn,
    Front,
    GuardTripped,
    Guards,
    InteractionRecord,
    Simulation,
    UnclassifiableInteraction,
    init,
)

__all__ = [
    "ConstrainedSolution",
    "ControlFn",
    "ConvergenceReport",
    "Front",
    "GuardTripped",
    "Guards",
    "HypothesisViolation",
    "InteractionRecord",
    "ModelParams",
    "Profile",
    "Scenario",
    "Simulation",
    "State",
    "UnclassifiableInteraction",
    "Wave",
    "WaveFan",
    "build_sim",
    "check_consistency",
    "convergence_study",
    "default_params",
    "discretize_rarefactions",
    "init",
    "l1_distance",
    "parse_scenario",
    "random_scenario",
    "solve_constrained",
    "solve_riemann",
    "to_json",
    "validate_params",
    "verify_ledger",
]

__version__ = "0.1.0"
