"""Synthesis of the modulation coefficients for a prescribed 1-cycle.

Given a dose ``lam``, a period ``T`` and the slopes the modulation should have
at the operating concentration ``ybar0``, the four affine coefficients follow
from the chain rule through the Hill map:

    k4 = F'(ybar0) / hill'(ybar0),     k3 = lam - k4 * hill(ybar0)
    k2 = Phi'(ybar0) / hill'(ybar0),   k1 = T   - k2 * hill(ybar0)

The slopes act as output-feedback gains on the linearised impulse map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cycle import CycleSolution, CycleSpec, OutputRange, analyze_cycle, is_schur, jacobian, output_range
from .errors import DegenerateSlope, InvalidParameter
from .feasibility import Corridor, IffResult, iff_check
from .model import HillNonlinearity, LinearPlant, PlantParams, build_plant, hill, hill_deriv, mat_exp
from .modulation import ModulationConfig, saturation, validate
from .sim import step


@dataclass(frozen=True)
class Bounds:
    phi_lo: float = 10.0
    phi_hi: float = 40.0
    f_lo: float = 0.0
    f_hi: float = 500.0


@dataclass(frozen=True)
class DesignRequest:
    spec: CycleSpec
    f_slope: float = -0.15
    phi_slope: float = 0.29
    bounds: Bounds = Bounds()
    plant: PlantParams = PlantParams()
    hill: HillNonlinearity = HillNonlinearity()

    def __post_init__(self) -> None:
        if self.f_slope > 0:
            raise InvalidParameter("f_slope must be <= 0 (dose non-increasing in ybar)")
        if self.phi_slope < 0:
            raise InvalidParameter("phi_slope must be >= 0 (period non-decreasing in ybar)")


@dataclass
class DesignResult:
    request: DesignRequest
    plant: LinearPlant
    modulation: ModulationConfig
    cycle: CycleSolution
    warnings: list[str] = field(default_factory=list)


@dataclass
class DesignVerification:
    iff: IffResult
    output: OutputRange
    closed_loop_residual: float
    realized_lam: float
    realized_period: float
    compliant: bool
    fraction_below: float
    fraction_above: float
    flags: list[str] = field(default_factory=list)


def synthesize(req: DesignRequest) -> DesignResult:
    plant = build_plant(req.plant)
    h = req.hill
    cycle = analyze_cycle(plant, req.spec, req.f_slope, req.phi_slope)
    y0 = cycle.ybar0
    if not y0 > 0:
        raise InvalidParameter("operating concentration must be positive (dose > 0)")
    slope = hill_deriv(h, y0)
    if slope == 0:
        raise DegenerateSlope(f"Hill slope vanishes at ybar0 = {y0}")
    effect = hill(h, y0)
    k4 = req.f_slope / slope
    k2 = req.phi_slope / slope
    b = req.bounds
    mod = ModulationConfig(
        k1=req.spec.period - k2 * effect,
        k2=k2,
        k3=req.spec.lam - k4 * effect,
        k4=k4,
        phi_lo=b.phi_lo,
        phi_hi=b.phi_hi,
        f_lo=b.f_lo,
        f_hi=b.f_hi,
        hill=h,
    )
    report = validate(mod)
    warnings = report.violations + report.warnings
    dose_sat, period_sat = saturation(mod, y0)
    if dose_sat:
        warnings.append("dose is saturated at the operating point; the cycle dose is not realised")
    if period_sat:
        warnings.append("period is saturated at the operating point; the cycle period is not realised")
    if not cycle.schur_stable:
        warnings.append(f"fixed point is not Schur stable (spectral radius {cycle.spectral_radius:.6g})")
    return DesignResult(request=req, plant=plant, modulation=mod, cycle=cycle, warnings=warnings)


def verify_design(result: DesignResult, corridor: Corridor) -> DesignVerification:
    """Check the designed loop against an effect corridor.

    Re-evaluates the impulse map with the synthesised modulation at the design
    fixed point (the residual should be at rounding level) and runs the exact
    corridor test on the 1-cycle.
    """
    spec = result.cycle.spec
    X = result.cycle.pre_jump
    res = step(result.plant, result.modulation, X)
    residual = float(np.linalg.norm(res.next_state - X))
    iff = iff_check(result.plant, corridor, spec)
    rng = output_range(result.plant, corridor.hill, spec)

    # share of the period spent outside the band, on a fine grid of one cycle
    taus = np.linspace(0.0, spec.period, 4001)
    ybar = mat_exp(result.plant, taus)[:, 2, :] @ result.cycle.post_jump
    below = float(np.mean(ybar > corridor.ybar_max))
    above = float(np.mean(ybar < corridor.ybar_min))

    flags = []
    if not iff.iff_holds:
        if iff.ybar_max_attained > corridor.ybar_max:
            flags.append(
                f"overdosing: effect falls to {rng.y_min:.4g}% below y_min={corridor.y_min:g}% "
                f"for {100 * below:.0f}% of the period"
            )
        if iff.ybar_min_attained < corridor.ybar_min:
            flags.append(
                f"underdosing: effect rises to {rng.y_max:.4g}% above y_max={corridor.y_max:g}% "
                f"for {100 * above:.0f}% of the period"
            )
    span = corridor.y_max - corridor.y_min
    if rng.y_max < corridor.y_min + 0.1 * span:
        flags.append(f"peak effect {rng.y_max:.4g}% sits near the lower corridor edge")
    if not result.cycle.schur_stable:
        flags.append("designed 1-cycle is not locally attractive")
    return DesignVerification(
        iff=iff,
        output=rng,
        closed_loop_residual=residual,
        realized_lam=res.lam,
        realized_period=res.period,
        compliant=iff.iff_holds,
        fraction_below=below,
        fraction_above=above,
        flags=flags,
    )


def slope_grid_search(
    plant: LinearPlant,
    spec: CycleSpec,
    f_range: tuple[float, float] = (-1.0, 0.0),
    phi_range: tuple[float, float] = (0.0, 1.0),
    n: int = 41,
) -> tuple[float, float, float]:
    """Slopes in a box that minimise the spectral radius of the fixed-point Jacobian.

    A convenience for picking gains; the synthesis itself takes the slopes as
    given.  Returns ``(f_slope, phi_slope, radius)``.
    """
    best = (0.0, 0.0, np.inf)
    for f, p in itertools.product(np.linspace(*f_range, n), np.linspace(*phi_range, n)):
        _, r = is_schur(jacobian(plant, spec, f, p))
        if r < best[2]:
            best = (float(f), float(p), r)
    return best
