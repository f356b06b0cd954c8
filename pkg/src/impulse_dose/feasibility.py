"""Feasibility of keeping the 1-cycle output inside an effect corridor.

The corridor ``y_min <= y <= y_max`` on the measured effect maps through the
decreasing Hill function to a concentration band
``ybar_min = hill_inv(y_max) <= ybar <= ybar_max = hill_inv(y_min)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cycle import CycleSpec, xi_extrema
from .errors import InvalidParameter
from .model import HillNonlinearity, LinearPlant, hill_inv

# Reference interval quoted for lam=300, T=20 on the nominal NMB patient.  The formula
# evaluated with the stated nominal parameters gives about (104.06, 414.95);
# kept for reference only, never asserted.
REFERENCE_NECESSARY_INTERVAL = (190.1695, 476.9292)

# Slack on corridor comparisons: regimens quoted to four decimals that sit
# exactly on a corridor edge miss it by a few parts in 1e7.
CORRIDOR_RTOL = 1e-5


@dataclass(frozen=True)
class Corridor:
    y_min: float
    y_max: float
    hill: HillNonlinearity = HillNonlinearity()

    def __post_init__(self) -> None:
        if not (0.0 < self.y_min < self.y_max < 100.0):
            raise InvalidParameter(
                f"corridor needs 0 < y_min < y_max < 100, got ({self.y_min}, {self.y_max})"
            )

    @property
    def ybar_min(self) -> float:
        return hill_inv(self.hill, self.y_max)

    @property
    def ybar_max(self) -> float:
        return hill_inv(self.hill, self.y_min)


@dataclass(frozen=True)
class IffResult:
    iff_holds: bool
    lambda_opt: float
    ratio: float
    corridor_ratio: float
    ratio_ok: bool
    ybar_min_attained: float
    ybar_max_attained: float


@dataclass(frozen=True)
class FeasibilityReport:
    spec: CycleSpec
    necessary_interval: tuple[float, float] | None
    in_necessary_interval: bool
    sufficient_simple: float | None
    iff_holds: bool
    lambda_opt: float
    ratio: float
    corridor_ratio: float
    ybar_min_attained: float
    ybar_max_attained: float


def ultimate_bounds(
    plant: LinearPlant,
    lambda_star: float,
    lambda_low: float,
    T_star: float,
    T_hi: float,
) -> tuple[float, float]:
    """Asymptotic bounds on the concentration of any impulse train.

    If every dose is at most ``lambda_star`` and every period at least
    ``T_star``, then ``limsup ybar <= upper``.  If every dose is at least
    ``lambda_low`` and every period at most ``T_hi``, then ``liminf ybar >= lower``.

    Returns:
        ``(upper, lower)``.
    """
    if not T_star > 0:
        raise InvalidParameter(f"T_star must be positive, got {T_star}")
    if T_hi < T_star:
        raise InvalidParameter("T_hi must not be smaller than T_star")
    if lambda_low < 0 or lambda_star < lambda_low:
        raise InvalidParameter("need 0 <= lambda_low <= lambda_star")
    a1 = plant.a[0]
    gain = plant.static_gain
    upper = gain * lambda_star / -math.expm1(-a1 * T_star)
    lower = gain * lambda_low * math.exp(-a1 * T_hi) / -math.expm1(-a1 * T_hi)
    return upper, lower


def necessary_interval(plant: LinearPlant, corridor: Corridor, T: float) -> tuple[float, float]:
    """Dose interval any corridor-compatible 1-cycle of period ``T`` must lie in."""
    if not T > 0:
        raise InvalidParameter(f"period must be positive, got {T}")
    a1 = plant.a[0]
    inv_gain = 1.0 / plant.static_gain
    lo = inv_gain * corridor.ybar_min * -math.expm1(-a1 * T)
    hi = inv_gain * corridor.ybar_max * math.expm1(a1 * T)
    return lo, hi


def sufficient_simple(
    plant: LinearPlant, corridor: Corridor, T: float, lambda_max: float
) -> float | None:
    """Witness dose from the simple sufficient test, or ``None`` when it does not apply.

    The test needs ``exp(a1 T) ybar_min < ybar_max``, which restricts ``T`` to
    fairly short periods.
    """
    if not T > 0:
        raise InvalidParameter(f"period must be positive, got {T}")
    if not lambda_max > 0:
        raise InvalidParameter(f"lambda_max must be positive, got {lambda_max}")
    a1 = plant.a[0]
    if not math.exp(a1 * T) * corridor.ybar_min < corridor.ybar_max:
        return None
    witness = corridor.ybar_min * math.expm1(a1 * T) / plant.static_gain
    return witness if lambda_max >= witness else None


def simple_period_threshold(plant: LinearPlant, corridor: Corridor) -> float:
    """Largest period for which the simple sufficient test can fire."""
    return math.log(corridor.ybar_max / corridor.ybar_min) / plant.a[0]


def iff_check(
    plant: LinearPlant, corridor: Corridor, spec: CycleSpec, rtol: float = CORRIDOR_RTOL
) -> IffResult:
    """Exact corridor test for the 1-cycle ``spec``.

    The cycle stays inside the band iff ``ybar_min <= lam * xi_T(tau) <= ybar_max``
    on the whole period; both edges are compared with relative slack ``rtol``.
    Also reports the ratio test (is *some* dose feasible at this period) and
    the minimal feasible dose ``lambda_opt``.
    """
    ext = xi_extrema(plant, spec.period)
    lo_att, hi_att = spec.lam * ext.min_value, spec.lam * ext.max_value
    ratio = ext.max_value / ext.min_value
    corridor_ratio = corridor.ybar_max / corridor.ybar_min
    holds = lo_att >= corridor.ybar_min * (1 - rtol) and hi_att <= corridor.ybar_max * (1 + rtol)
    return IffResult(
        iff_holds=bool(holds),
        lambda_opt=corridor.ybar_min / ext.min_value,
        ratio=ratio,
        corridor_ratio=corridor_ratio,
        ratio_ok=bool(ratio <= corridor_ratio * (1 + 2 * rtol)),
        ybar_min_attained=lo_att,
        ybar_max_attained=hi_att,
    )


def assess(
    plant: LinearPlant,
    corridor: Corridor,
    spec: CycleSpec,
    lambda_max: float | None = None,
) -> FeasibilityReport:
    """Run every feasibility test for ``spec`` and collect the results."""
    lo, hi = necessary_interval(plant, corridor, spec.period)
    interval = (lo, hi) if lo <= hi else None
    inside = interval is not None and lo * (1 - CORRIDOR_RTOL) <= spec.lam <= hi * (1 + CORRIDOR_RTOL)
    witness = sufficient_simple(
        plant, corridor, spec.period, math.inf if lambda_max is None else lambda_max
    )
    res = iff_check(plant, corridor, spec)
    return FeasibilityReport(
        spec=spec,
        necessary_interval=interval,
        in_necessary_interval=inside,
        sufficient_simple=witness,
        iff_holds=res.iff_holds,
        lambda_opt=res.lambda_opt,
        ratio=res.ratio,
        corridor_ratio=res.corridor_ratio,
        ybar_min_attained=res.ybar_min_attained,
        ybar_max_attained=res.ybar_max_attained,
    )
