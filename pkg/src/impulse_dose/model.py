"""Wiener PK/PD plant: a three-compartment linear chain followed by a Hill map.

The linear block is

    dx/dt = A x,   ybar = C x,

with ``A`` lower triangular (Metzler and Hurwitz), ``B = e1`` and ``C = e3``,
so an impulse into the first compartment never moves the output
instantaneously (``C B = 0``).  The measured effect is ``y = hill(ybar)``.

Units follow the clinical setting: time in minutes, rates in 1/min, doses
in micrograms, concentrations in micrograms per millilitre, effect in percent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateSpectrum, InvalidParameter, OutOfRange

B = np.array([1.0, 0.0, 0.0])
C = np.array([0.0, 0.0, 1.0])

# relative eigenvalue gap below which the divided differences lose accuracy
_CLOSE_SPECTRUM_RTOL = 1e-8
_SERIES_TOL = 1e-13


@dataclass(frozen=True)
class PlantParams:
    """Patient parameters of the atracurium-type PK chain.

    Attributes:
        alpha: Patient specific rate parameter (1/min), ``0 < alpha <= 0.1``.
        v: Fixed rate multipliers; compartment ``i`` decays at ``v[i] * alpha``.
        g1: Coupling from compartment 1 to 2. ``None`` selects the default
            split ``g1 = v1 * alpha``; ``g2`` always follows from
            ``g1 * g2 = v1 v2 v3 alpha**3``.
    """

    alpha: float = 0.0374
    v: tuple[float, float, float] = (1.0, 4.0, 10.0)
    g1: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 0.1):
            raise InvalidParameter(f"alpha must lie in (0, 0.1], got {self.alpha}")
        if len(self.v) != 3 or any(vi <= 0 for vi in self.v):
            raise InvalidParameter(f"v must hold three positive multipliers, got {self.v}")
        if len(set(self.v)) != 3:
            raise DegenerateSpectrum(f"rate multipliers must be pairwise distinct, got {self.v}")
        if self.g1 is not None and self.g1 <= 0:
            raise InvalidParameter(f"g1 must be positive, got {self.g1}")

    @property
    def gain_product(self) -> float:
        v1, v2, v3 = self.v
        return v1 * v2 * v3 * self.alpha**3

    def split(self) -> tuple[float, float]:
        """Return ``(g1, g2)`` honouring the product constraint."""
        g1 = self.v[0] * self.alpha if self.g1 is None else self.g1
        return g1, self.gain_product / g1


@dataclass(frozen=True)
class LinearPlant:
    """Triangular compartment chain ``(A, B, C)``.

    ``a`` holds the decay rates (the negated diagonal of ``A``); ``g1`` and
    ``g2`` are the sub-diagonal couplings.
    """

    a: tuple[float, float, float]
    g1: float
    g2: float

    def __post_init__(self) -> None:
        if any(ai <= 0 for ai in self.a):
            raise InvalidParameter(f"decay rates must be positive (Hurwitz A), got {self.a}")
        if self.g1 <= 0 or self.g2 <= 0:
            raise InvalidParameter("couplings g1, g2 must be positive (Metzler A)")
        if len(set(self.a)) != 3:
            raise DegenerateSpectrum(f"decay rates must be pairwise distinct, got {self.a}")

    @cached_property
    def A(self) -> np.ndarray:
        a1, a2, a3 = self.a
        A = np.array([[-a1, 0.0, 0.0], [self.g1, -a2, 0.0], [0.0, self.g2, -a3]])
        A.setflags(write=False)
        return A

    @property
    def B(self) -> np.ndarray:
        return B

    @property
    def C(self) -> np.ndarray:
        return C

    @property
    def static_gain(self) -> float:
        """``g1 g2 / (a2 a3)``, the factor appearing in the ultimate output bounds."""
        return self.g1 * self.g2 / (self.a[1] * self.a[2])

    @cached_property
    def well_separated(self) -> bool:
        a = sorted(self.a)
        gap = min(a[1] - a[0], a[2] - a[1])
        return gap >= _CLOSE_SPECTRUM_RTOL * a[2]

    def expm(self, t):
        return mat_exp(self, t)


def build_plant(params: PlantParams) -> LinearPlant:
    """Build the linear block from patient parameters."""
    g1, g2 = params.split()
    a = tuple(vi * params.alpha for vi in params.v)
    return LinearPlant(a=a, g1=g1, g2=g2)


def mat_exp(plant: LinearPlant, t):
    """Exact ``exp(t A)`` for the triangular plant.

    ``t`` may be a scalar (returns ``(3, 3)``) or an array of shape ``(n,)``
    (returns ``(n, 3, 3)``).  Entries below the diagonal are divided
    differences of ``exp(-a t)`` over the decay rates, so every entry is
    non-negative.  Nearly coincident rates switch to scaling-and-squaring.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InvalidParameter("mat_exp requires t >= 0")
    if not plant.well_separated:
        if t_arr.ndim == 0:
            return _expm_series(plant.A * float(t_arr))
        return np.stack([_expm_series(plant.A * ti) for ti in t_arr])

    a1, a2, a3 = plant.a
    e1, e2, e3 = np.exp(-a1 * t_arr), np.exp(-a2 * t_arr), np.exp(-a3 * t_arr)
    # negated first divided differences of exp(-a t), via expm1 for accuracy
    d12 = e2 * np.expm1(-(a1 - a2) * t_arr) / (a2 - a1)
    d23 = e3 * np.expm1(-(a2 - a3) * t_arr) / (a3 - a2)
    # rounding can push the second difference slightly negative as t -> 0
    dd = np.maximum((d12 - d23) / (a3 - a1), 0.0)

    out = np.zeros(t_arr.shape + (3, 3))
    out[..., 0, 0] = e1
    out[..., 1, 1] = e2
    out[..., 2, 2] = e3
    out[..., 1, 0] = plant.g1 * d12
    out[..., 2, 1] = plant.g2 * d23
    out[..., 2, 0] = plant.g1 * plant.g2 * dd
    return out


def _expm_series(M: np.ndarray) -> np.ndarray:
    norm = np.abs(M).sum(axis=0).max()
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0 else 0
    Ms = M / 2.0**s
    result = np.eye(3)
    term = np.eye(3)
    for k in range(1, 40):
        term = term @ Ms / k
        result = result + term
        if np.abs(term).max() <= _SERIES_TOL * np.abs(result).max():
            break
    for _ in range(s):
        result = result @ result
    return result


@dataclass(frozen=True)
class HillNonlinearity:
    """Static effect map ``phi(ybar) = 100 c50**gamma / (c50**gamma + ybar**gamma)``."""

    c50: float = 3.2425
    gamma: float = 2.6677

    def __post_init__(self) -> None:
        if self.c50 <= 0:
            raise InvalidParameter(f"c50 must be positive, got {self.c50}")
        if not (0.0 < self.gamma <= 10.0):
            raise InvalidParameter(f"gamma must lie in (0, 10], got {self.gamma}")

    def __call__(self, ybar):
        return hill(self, ybar)


def hill(h: HillNonlinearity, ybar):
    """Effect in percent produced by concentration ``ybar``; 100 at zero, 50 at ``c50``."""
    y = np.asarray(ybar, dtype=float)
    if np.any(y < 0):
        raise InvalidParameter("hill requires ybar >= 0")
    # (ybar / c50)**gamma avoids overflow of the raw powers
    r = (y / h.c50) ** h.gamma
    out = 100.0 / (1.0 + r)
    return float(out) if out.ndim == 0 else out


def hill_inv(h: HillNonlinearity, y: float) -> float:
    """Concentration producing effect ``y`` percent, ``0 < y < 100``."""
    if not (0.0 < y < 100.0):
        raise OutOfRange(f"effect must lie strictly inside (0, 100), got {y}")
    return h.c50 * (100.0 / y - 1.0) ** (1.0 / h.gamma)


def hill_deriv(h: HillNonlinearity, ybar):
    """Slope of the Hill map, percent per unit concentration (always <= 0)."""
    y = np.asarray(ybar, dtype=float)
    if np.any(y < 0):
        raise InvalidParameter("hill_deriv requires ybar >= 0")
    if np.any(y == 0) and h.gamma < 1:
        raise InvalidParameter("hill_deriv is singular at ybar = 0 when gamma < 1")
    cg = h.c50**h.gamma
    out = -h.gamma * 100.0 * cg * y ** (h.gamma - 1.0) / (cg + y**h.gamma) ** 2
    return float(out) if out.ndim == 0 else out
