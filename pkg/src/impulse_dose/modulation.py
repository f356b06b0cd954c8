"""Saturated piecewise-affine dose/period modulation composed with the Hill map.

The controller fires at ``t_n`` with dose ``F(ybar(t_n))`` and schedules the
next firing ``Phi(ybar(t_n))`` minutes later, where

    F(ybar)   = clamp(k4 * hill(ybar) + k3, f_lo, f_hi)
    Phi(ybar) = clamp(k2 * hill(ybar) + k1, phi_lo, phi_hi)

With ``k4 >= 0`` and ``k2 <= 0`` and a decreasing Hill map, the dose is
non-increasing and the period non-decreasing in the concentration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import HillNonlinearity, hill, hill_deriv


@dataclass(frozen=True)
class ModulationConfig:
    k1: float
    k2: float
    k3: float
    k4: float
    phi_lo: float = 10.0
    phi_hi: float = 40.0
    f_lo: float = 0.0
    f_hi: float = 500.0
    hill: HillNonlinearity = field(default_factory=HillNonlinearity)

    def dose_affine(self, ybar):
        return self.k4 * hill(self.hill, ybar) + self.k3

    def period_affine(self, ybar):
        return self.k2 * hill(self.hill, ybar) + self.k1


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _clamp(x, lo, hi):
    out = np.minimum(np.maximum(x, lo), hi)
    return float(out) if np.ndim(out) == 0 else out


def eval_period(cfg: ModulationConfig, ybar):
    """Inter-dose interval (min) scheduled when the firing concentration is ``ybar``."""
    return _clamp(cfg.period_affine(ybar), cfg.phi_lo, cfg.phi_hi)


def eval_dose(cfg: ModulationConfig, ybar):
    """Dose (ug) administered when the firing concentration is ``ybar``."""
    return _clamp(cfg.dose_affine(ybar), cfg.f_lo, cfg.f_hi)


def dose_slope(cfg: ModulationConfig, ybar: float) -> float:
    """``dF/dybar``; zero where the dose is saturated."""
    if not (cfg.f_lo < cfg.dose_affine(ybar) < cfg.f_hi):
        return 0.0
    return cfg.k4 * hill_deriv(cfg.hill, ybar)


def period_slope(cfg: ModulationConfig, ybar: float) -> float:
    """``dPhi/dybar``; zero where the period is saturated."""
    if not (cfg.phi_lo < cfg.period_affine(ybar) < cfg.phi_hi):
        return 0.0
    return cfg.k2 * hill_deriv(cfg.hill, ybar)


def saturation(cfg: ModulationConfig, ybar: float) -> tuple[bool, bool]:
    """Return ``(dose_saturated, period_saturated)`` at ``ybar``.

    A value sitting exactly on a bound counts as saturated.
    """
    d = cfg.dose_affine(ybar)
    p = cfg.period_affine(ybar)
    return (not cfg.f_lo < d < cfg.f_hi, not cfg.phi_lo < p < cfg.phi_hi)


def validate(cfg: ModulationConfig) -> ValidationReport:
    """Check bound ordering and slope signs; never raises."""
    report = ValidationReport()
    if not cfg.phi_lo > 0:
        report.violations.append("period lower bound must be positive")
    if cfg.phi_lo > cfg.phi_hi:
        report.violations.append("period bounds inverted")
    if cfg.f_lo < 0:
        report.violations.append("dose lower bound must be non-negative")
    elif cfg.f_lo == 0:
        report.warnings.append("dose lower bound is zero: no minimum-dose guarantee")
    if cfg.f_lo > cfg.f_hi:
        report.violations.append("dose bounds inverted")
    if cfg.k4 < 0:
        report.violations.append("dose must be non-increasing in ybar (k4 >= 0)")
    if cfg.k2 > 0:
        report.violations.append("period must be non-decreasing in ybar (k2 <= 0)")
    for name in ("k1", "k2", "k3", "k4", "phi_lo", "phi_hi", "f_lo", "f_hi"):
        if not np.isfinite(getattr(cfg, name)):
            report.violations.append(f"{name} is not finite")
    if report.ok:
        # the Hill map spans (0, 100]; check the clamped range is not a single constant
        lo_d, hi_d = sorted((cfg.k3, cfg.k3 + 100.0 * cfg.k4))
        lo_p, hi_p = sorted((cfg.k1, cfg.k1 + 100.0 * cfg.k2))
        if hi_d <= cfg.f_lo or lo_d >= cfg.f_hi:
            report.warnings.append("dose is saturated for every concentration")
        if hi_p <= cfg.phi_lo or lo_p >= cfg.phi_hi:
            report.warnings.append("period is saturated for every concentration")
    return report
