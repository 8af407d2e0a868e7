"""Palindromic splitting methods for polynomial Hamiltonians.

Coefficient storage and validation, kick/drift integration with force-evaluation
accounting, low-order omega conditions, exact polynomial Lie brackets, a
split-step Fourier propagator and experiment drivers.
"""

from .integrator import DivergenceError, Trajectory, integrate, step
from .order import OmegaReport, empirical_order, omega
from .schemes import (
    BUILTIN_NAMES,
    SchemeError,
    SplittingScheme,
    builtin_scheme,
    compose_strang,
    load_scheme_file,
    validate,
)
from .systems import PhaseState, SeparableSystem, henon_heiles, make_problem

__all__ = [
    "BUILTIN_NAMES",
    "DivergenceError",
    "OmegaReport",
    "PhaseState",
    "SchemeError",
    "SeparableSystem",
    "SplittingScheme",
    "Trajectory",
    "builtin_scheme",
    "compose_strang",
    "empirical_order",
    "henon_heiles",
    "integrate",
    "load_scheme_file",
    "make_problem",
    "omega",
    "step",
    "validate",
]
__version__ = "0.1.0"
