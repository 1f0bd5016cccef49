"""Equilibrium stability from cycle-averaged functionals on a small excitation orbit."""
from .averaging import (
    DEFAULT_EPSILON,
    ExcitationOrbit,
    FunctionalResult,
    cycle_average,
    eigen_summary,
    functionals,
    functionals_scalar,
    functionals_statespace,
    limit_cycle_amplitude,
)
from .classify import (
    Analysis,
    SingularPointType,
    Verdict,
    analyze,
    classify,
    classify_singular_point,
)
from .errors import *  # noqa: F401,F403
from .expr import evaluate, parse_expr, to_string
from .linearize import (
    EpsilonSweep,
    JacobianComparison,
    LinearizedModel,
    averaging_matrix,
    compare_jacobian,
    eigenvalues,
    epsilon_sweep,
    jacobian_fd,
)
from .ode import Trajectory, empirical_verdict, integrate, portrait
from .system import (
    SystemDef,
    fixture,
    fixture_names,
    load_system,
    parse_system,
    shift_equilibrium,
    verify_equilibrium,
)

__version__ = "0.1.0"
