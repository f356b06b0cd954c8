"""1-cycles of the impulsive closed loop.

A 1-cycle fires the same dose ``lam`` every ``T`` minutes.  Its pre-jump
state ``X`` is the fixed point of the impulse-to-impulse map

    Q(x) = exp(Phi(Cx) A) (x + F(Cx) B),

and between firings the concentration follows ``ybar(t_n + tau) = lam * xi_T(tau)``
with the kernel ``xi_T(tau) = C exp(tau A) (I - exp(T A))^{-1} B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidParameter, OutOfRange
from .model import B, C, HillNonlinearity, LinearPlant, hill, mat_exp

_EXTREMA_GRID = 1024
_EXTREMA_XTOL = 1e-12


@dataclass(frozen=True)
class CycleSpec:
    lam: float
    period: float

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise InvalidParameter(f"dose must be non-negative, got {self.lam}")
        if not self.period > 0:
            raise InvalidParameter(f"period must be positive, got {self.period}")


@dataclass(frozen=True)
class CycleSolution:
    """Everything known about one 1-cycle.

    ``pre_jump`` is the state just before each firing and ``post_jump`` the
    state just after it.  The extremum and stability fields are filled by
    :func:`analyze_cycle`; :func:`fixed_point` leaves them as ``None``.
    """

    spec: CycleSpec
    pre_jump: np.ndarray
    post_jump: np.ndarray
    residual: float
    ybar_min: float | None = None
    ybar_max: float | None = None
    tau_min: float | None = None
    tau_max: float | None = None
    jacobian: np.ndarray | None = None
    eigenvalues: np.ndarray | None = None
    spectral_radius: float | None = None
    schur_stable: bool | None = None

    @property
    def ybar0(self) -> float:
        return float(C @ self.pre_jump)


class Extrema(NamedTuple):
    min_value: float
    argmin: float
    max_value: float
    argmax: float


class OutputRange(NamedTuple):
    ybar_min: float
    ybar_max: float
    y_max: float
    y_min: float
    tau_min: float
    tau_max: float


def _cycle_state(plant: LinearPlant, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Return ``exp(T A)`` and the unit-dose post-jump state ``(I - exp(T A))^{-1} B``."""
    E = mat_exp(plant, T)
    return E, np.linalg.solve(np.eye(3) - E, B)


def fixed_point(plant: LinearPlant, spec: CycleSpec) -> CycleSolution:
    """Pre- and post-jump states of the 1-cycle with dose ``spec.lam`` and period ``spec.period``.

    The post-jump state solves ``X+ = lam (I - exp(T A))^{-1} B``; the
    pre-jump state is one period of free decay later, ``X = exp(T A) X+``.
    """
    E, unit = _cycle_state(plant, spec.period)
    post = spec.lam * unit
    pre = E @ post
    residual = float(np.linalg.norm(E @ (pre + spec.lam * B) - pre))
    return CycleSolution(spec=spec, pre_jump=pre, post_jump=post, residual=residual)


def xi(plant: LinearPlant, T: float, tau):
    """Unit-dose 1-cycle output at time ``tau`` after a firing, ``0 <= tau <= T``."""
    if not T > 0:
        raise InvalidParameter(f"period must be positive, got {T}")
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0) or np.any(tau_arr > T):
        raise OutOfRange(f"tau must lie in [0, {T}]")
    _, unit = _cycle_state(plant, T)
    out = mat_exp(plant, tau_arr)[..., 2, :] @ unit
    return float(out) if out.ndim == 0 else out


def xi_extrema(plant: LinearPlant, T: float) -> Extrema:
    """Global minimum and maximum of ``xi_T`` over ``[0, T]``.

    ``xi_T`` is a sum of three exponentials, so its derivative changes sign at
    most twice.  Sign changes are located on a uniform grid and refined with
    Brent's method; the endpoints are always candidates.
    """
    if not T > 0:
        raise InvalidParameter(f"period must be positive, got {T}")
    _, unit = _cycle_state(plant, T)
    cA = C @ plant.A

    def value(t):
        return mat_exp(plant, t)[..., 2, :] @ unit

    def slope(t):
        return mat_exp(plant, t) @ unit @ cA

    grid = np.linspace(0.0, T, _EXTREMA_GRID + 1)
    d = slope(grid)
    candidates = [0.0, T]
    for i in range(_EXTREMA_GRID):
        if d[i] == 0.0:
            candidates.append(grid[i])
        elif d[i] * d[i + 1] < 0:
            candidates.append(brentq(slope, grid[i], grid[i + 1], xtol=_EXTREMA_XTOL))
    taus = np.array(candidates)
    vals = value(taus)
    i_min, i_max = int(np.argmin(vals)), int(np.argmax(vals))
    return Extrema(float(vals[i_min]), float(taus[i_min]), float(vals[i_max]), float(taus[i_max]))


def jacobian(plant: LinearPlant, spec: CycleSpec, f_slope: float, phi_slope: float) -> np.ndarray:
    """Jacobian of the impulse map at the 1-cycle fixed point.

    ``Q'(X) = exp(A T) + K C`` with gain ``K = exp(A T) B * f_slope + A X * phi_slope``,
    where the slopes are ``dF/dybar`` and ``dPhi/dybar`` at ``ybar0``.
    """
    E = mat_exp(plant, spec.period)
    X = fixed_point(plant, spec).pre_jump
    K = (E @ B) * f_slope + (plant.A @ X) * phi_slope
    return E + np.outer(K, C)


def is_schur(matrix) -> tuple[bool, float]:
    """Schur stability verdict and spectral radius.  Radius exactly 1 is unstable."""
    M = np.asarray(matrix, dtype=float)
    if M.size == 0:
        return True, 0.0
    radius = float(np.max(np.abs(np.linalg.eigvals(M))))
    return radius < 1.0, radius


def output_range(plant: LinearPlant, h: HillNonlinearity, spec: CycleSpec) -> OutputRange:
    """Extremes of ``ybar`` and ``y`` over one period of the 1-cycle.

    The Hill map is decreasing, so the largest effect ``y_max`` comes from the
    smallest concentration.
    """
    ext = xi_extrema(plant, spec.period)
    lo, hi = spec.lam * ext.min_value, spec.lam * ext.max_value
    return OutputRange(
        ybar_min=lo,
        ybar_max=hi,
        y_max=hill(h, lo),
        y_min=hill(h, hi),
        tau_min=ext.argmin,
        tau_max=ext.argmax,
    )


def analyze_cycle(
    plant: LinearPlant, spec: CycleSpec, f_slope: float = 0.0, phi_slope: float = 0.0
) -> CycleSolution:
    """Fixed point, concentration extremes, Jacobian and stability verdict in one record."""
    base = fixed_point(plant, spec)
    ext = xi_extrema(plant, spec.period)
    J = jacobian(plant, spec, f_slope, phi_slope)
    eig = np.linalg.eigvals(J)
    stable, radius = is_schur(J)
    return CycleSolution(
        spec=spec,
        pre_jump=base.pre_jump,
        post_jump=base.post_jump,
        residual=base.residual,
        ybar_min=spec.lam * ext.min_value,
        ybar_max=spec.lam * ext.max_value,
        tau_min=ext.argmin,
        tau_max=ext.argmax,
        jacobian=J,
        eigenvalues=eig[np.argsort(-np.abs(eig))],
        spectral_radius=radius,
        schur_stable=stable,
    )
