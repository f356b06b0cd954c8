"""Pulse-modulated (dose and period) feedback for positive Wiener PK/PD plants.

Design of the modulation for a prescribed 1-cycle, feasibility of an effect
corridor, exact hybrid simulation and parameter sweeps.
"""

from .bifurcation import BifurcationDiagram, SweepConfig, classify_saturation, detect_period, sweep
from .cycle import (
    CycleSolution,
    CycleSpec,
    analyze_cycle,
    fixed_point,
    is_schur,
    jacobian,
    output_range,
    xi,
    xi_extrema,
)
from .design import Bounds, DesignRequest, DesignResult, slope_grid_search, synthesize, verify_design
from .errors import DegenerateSlope, DegenerateSpectrum, ImpulseDoseError, InvalidParameter, OutOfRange
from .feasibility import Corridor, assess, iff_check, necessary_interval, sufficient_simple, ultimate_bounds
from .model import HillNonlinearity, LinearPlant, PlantParams, build_plant, hill, hill_deriv, hill_inv, mat_exp
from .modulation import ModulationConfig, eval_dose, eval_period, validate
from .sim import SimTrace, bolus_scenario, detect_convergence, simulate, step

__version__ = "0.1.0"

__all__ = [
    "BifurcationDiagram",
    "Bounds",
    "Corridor",
    "CycleSolution",
    "CycleSpec",
    "DegenerateSlope",
    "DegenerateSpectrum",
    "DesignRequest",
    "DesignResult",
    "HillNonlinearity",
    "ImpulseDoseError",
    "InvalidParameter",
    "LinearPlant",
    "ModulationConfig",
    "OutOfRange",
    "PlantParams",
    "SimTrace",
    "SweepConfig",
    "analyze_cycle",
    "assess",
    "bolus_scenario",
    "build_plant",
    "classify_saturation",
    "detect_convergence",
    "detect_period",
    "eval_dose",
    "eval_period",
    "fixed_point",
    "hill",
    "hill_deriv",
    "hill_inv",
    "iff_check",
    "is_schur",
    "jacobian",
    "mat_exp",
    "necessary_interval",
    "output_range",
    "simulate",
    "slope_grid_search",
    "step",
    "sufficient_simple",
    "sweep",
    "synthesize",
    "ultimate_bounds",
    "validate",
    "verify_design",
    "xi",
    "xi_extrema",
]
