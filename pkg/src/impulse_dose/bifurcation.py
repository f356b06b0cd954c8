"""Parameter sweeps of the closed loop with a frozen controller.

For each value of the swept patient parameter the plant is rebuilt, the
impulse map is iterated past its transient, and the recorded pre-jump states
are classified by their period.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameter
from .model import PlantParams, build_plant
from .modulation import ModulationConfig, saturation
from .sim import step

PARAMETERS = ("alpha", "gamma")


@dataclass(frozen=True)
class SweepConfig:
    parameter: str = "alpha"
    lo: float = 0.0274
    hi: float = 0.04824
    steps: int = 60
    transient_impulses: int = 500
    record_impulses: int = 128
    max_period: int = 32
    tol: float = 1e-6
    coordinate: int = 0
    x0: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.parameter not in PARAMETERS:
            raise InvalidParameter(f"parameter must be one of {PARAMETERS}, got {self.parameter!r}")
        if self.steps < 1:
            raise InvalidParameter("steps must be >= 1")
        if self.steps >= 2 and not self.lo < self.hi:
            raise InvalidParameter("sweep range needs lo < hi")
        if self.steps == 1 and self.lo > self.hi:
            raise InvalidParameter("sweep range needs lo <= hi")
        if self.max_period < 1 or 2 * self.max_period > self.record_impulses:
            raise InvalidParameter("need 1 <= max_period <= record_impulses / 2")
        if self.transient_impulses < 0:
            raise InvalidParameter("transient_impulses must be non-negative")
        if self.coordinate not in (0, 1, 2):
            raise InvalidParameter("coordinate must be 0, 1 or 2")
        if any(c < 0 for c in self.x0):
            raise InvalidParameter("x0 must be non-negative")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.steps)


class SaturationFlags(NamedTuple):
    dose: bool
    period: bool

    @property
    def any(self) -> bool:
        return self.dose or self.period


@dataclass
class BifurcationRow:
    """Steady-state orbit at one parameter value.

    For a detected period ``p`` the arrays hold the ``p`` periodic points in
    firing order; for an aperiodic row they hold every recorded point.
    """

    value: float
    period: int | None
    points: np.ndarray
    doses: np.ndarray
    periods: np.ndarray
    dose_saturated: np.ndarray
    period_saturated: np.ndarray

    @property
    def lam_range(self) -> tuple[float, float]:
        return float(self.doses.min()), float(self.doses.max())

    @property
    def period_range(self) -> tuple[float, float]:
        return float(self.periods.min()), float(self.periods.max())

    @property
    def label(self) -> str:
        return "aperiodic" if self.period is None else str(self.period)


@dataclass
class BifurcationDiagram:
    parameter: str
    config: SweepConfig
    rows: list[BifurcationRow] = field(default_factory=list)

    def periods(self) -> list[int | None]:
        return [r.period for r in self.rows]


def detect_period(samples, max_period: int, tol: float = 1e-6) -> int | None:
    """Smallest ``p <= max_period`` with ``|X[n+p] - X[n]| <= tol (1 + |X[n]|)`` for every recorded ``n``."""
    X = np.asarray(samples, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if len(X) < 2 * max_period:
        raise InvalidParameter(f"need at least {2 * max_period} samples, got {len(X)}")
    scale = 1.0 + np.linalg.norm(X, axis=1)
    for p in range(1, max_period + 1):
        gap = np.linalg.norm(X[p:] - X[:-p], axis=1)
        if np.all(gap <= tol * scale[:-p]):
            return p
    return None


def classify_saturation(row: BifurcationRow) -> SaturationFlags:
    """Does any periodic point fire with a clamped dose or a clamped period?"""
    return SaturationFlags(bool(np.any(row.dose_saturated)), bool(np.any(row.period_saturated)))


def _row(params: PlantParams, modulation: ModulationConfig, cfg: SweepConfig, value: float) -> BifurcationRow:
    if cfg.parameter == "alpha":
        plant = build_plant(replace(params, alpha=float(value)))
        mod = modulation
    else:
        plant = build_plant(params)
        mod = replace(modulation, hill=replace(modulation.hill, gamma=float(value)))

    x = np.array(cfg.x0, dtype=float)
    for _ in range(cfg.transient_impulses):
        x = step(plant, mod, x).next_state
    states, doses, periods, dsat, psat = [], [], [], [], []
    for _ in range(cfg.record_impulses):
        res = step(plant, mod, x)
        d, p = saturation(mod, float(x[2]))
        states.append(x)
        doses.append(res.lam)
        periods.append(res.period)
        dsat.append(d)
        psat.append(p)
        x = res.next_state
    states = np.array(states)
    period = detect_period(states, cfg.max_period, cfg.tol)
    keep = slice(None) if period is None else slice(0, period)
    return BifurcationRow(
        value=float(value),
        period=period,
        points=states[keep],
        doses=np.array(doses)[keep],
        periods=np.array(periods)[keep],
        dose_saturated=np.array(dsat)[keep],
        period_saturated=np.array(psat)[keep],
    )


def sweep(
    params: PlantParams,
    modulation: ModulationConfig,
    cfg: SweepConfig,
    workers: int = 1,
) -> BifurcationDiagram:
    """Chart the steady orbit structure over ``cfg.parameter``.

    ``alpha`` rebuilds the linear block; ``gamma`` changes the Hill slope of
    the effect map that the frozen controller composes with.  Rows are
    independent; with ``workers > 1`` they run on a thread pool but are
    always returned in parameter order.
    """
    values = cfg.values()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _row(params, modulation, cfg, v), values))
    else:
        rows = [_row(params, modulation, cfg, v) for v in values]
    return BifurcationDiagram(parameter=cfg.parameter, config=cfg, rows=rows)
