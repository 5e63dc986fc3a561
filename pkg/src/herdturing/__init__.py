"""Analysis toolkit for a diffusive predator-prey model with herd behavior,
a multiple Allee effect and quadratic predator mortality.

Modules: model (parameters, reaction terms, Taylor data), equilibria,
local (ODE stability and local bifurcations), spatial (Turing and Hopf
curves at E31), normal_forms (Hopf and pitchfork coefficients), simulate
(ODE/PDE integration), io and cli (configuration, output, command line).
"""

from .equilibria import Equilibrium, Kind, classify_case, find_equilibria
from .errors import (AdmissibilityError, ConfigError, DegeneracyError, DomainError,
                     HerdTuringError, InstabilityError, PreconditionError, ToleranceFailure)
from .model import RawParams, ScaledParams, preset_h1, preset_h2, rescale

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError", "ConfigError", "DegeneracyError", "DomainError", "Equilibrium",
    "HerdTuringError", "InstabilityError", "Kind", "PreconditionError", "RawParams",
    "ScaledParams", "ToleranceFailure", "classify_case", "find_equilibria", "preset_h1",
    "preset_h2", "rescale",
]
