import math

import numpy as np
import pytest

from impulse_dose.cycle import CycleSpec, xi
from impulse_dose.errors import InvalidParameter
from impulse_dose.feasibility import (
    REFERENCE_NECESSARY_INTERVAL,
    Corridor,
    assess,
    iff_check,
    necessary_interval,
    simple_period_threshold,
    sufficient_simple,
    ultimate_bounds,
)
from impulse_dose.model import HillNonlinearity

H = HillNonlinearity(3.2425, 2.6677)
CORRIDOR = Corridor(2.0, 10.0, H)


def scalar_interval(alpha, ybar_min, ybar_max, T):
    """Independent oracle: a = alpha (1, 4, 10), g1 g2 = 40 alpha^3."""
    a1, a2, a3 = alpha, 4 * alpha, 10 * alpha
    k = a2 * a3 / (40 * alpha**3)
    return k * ybar_min * (1 - math.exp(-a1 * T)), k * ybar_max * (math.exp(a1 * T) - 1)


def test_corridor_band():
    assert CORRIDOR.ybar_min == pytest.approx(7.388942996902614, rel=1e-12)
    assert CORRIDOR.ybar_max == pytest.approx(13.946267892989827, rel=1e-12)


@pytest.mark.parametrize("lo, hi", [(0.0, 10.0), (10.0, 2.0), (5.0, 100.0), (3.0, 3.0)])
def test_corridor_invalid(lo, hi):
    with pytest.raises(InvalidParameter):
        Corridor(lo, hi, H)


def test_necessary_interval_value(plant):
    lo, hi = necessary_interval(plant, CORRIDOR, 20.0)
    assert lo == pytest.approx(104.05523798815668, rel=1e-10)
    assert hi == pytest.approx(414.9463095878313, rel=1e-10)
    assert (lo, hi) == pytest.approx(scalar_interval(0.0374, CORRIDOR.ybar_min, CORRIDOR.ybar_max, 20.0), rel=1e-10)
    # the quoted reference is kept but does not agree with the formula
    assert REFERENCE_NECESSARY_INTERVAL[0] != pytest.approx(lo, rel=0.1)


def test_necessary_interval_short_period(plant):
    lo, _ = necessary_interval(plant, CORRIDOR, 1e-9)
    assert lo < 1e-6


def test_simple_threshold(plant):
    T_star = simple_period_threshold(plant, CORRIDOR)
    assert T_star == pytest.approx(16.984685688049968, rel=1e-10)
    assert sufficient_simple(plant, CORRIDOR, T_star + 0.01, math.inf) is None
    w = sufficient_simple(plant, CORRIDOR, T_star - 1.0, math.inf)
    assert w is not None
    assert sufficient_simple(plant, CORRIDOR, T_star - 1.0, w * 0.99) is None


def test_simple_witness_is_feasible(plant):
    for T in (2.0, 8.0, 15.0):
        w = sufficient_simple(plant, CORRIDOR, T, math.inf)
        assert iff_check(plant, CORRIDOR, CycleSpec(w, T)).iff_holds


def test_ultimate_bounds_value(plant):
    upper, lower = ultimate_bounds(plant, 300.0, 300.0, 20.0, 20.0)
    assert upper == pytest.approx(21.30294391641372, rel=1e-12)
    assert lower == pytest.approx(10.082943916413722, rel=1e-12)


def test_ultimate_bounds_enclose_cycle(plant):
    res = iff_check(plant, CORRIDOR, CycleSpec(300.0, 20.0))
    upper, lower = ultimate_bounds(plant, 300.0, 300.0, 20.0, 20.0)
    assert lower <= res.ybar_min_attained and res.ybar_max_attained <= upper


def test_ultimate_bounds_errors(plant):
    with pytest.raises(InvalidParameter):
        ultimate_bounds(plant, 300.0, 300.0, 0.0, 20.0)
    with pytest.raises(InvalidParameter):
        ultimate_bounds(plant, 300.0, 300.0, 20.0, 10.0)
    with pytest.raises(InvalidParameter):
        ultimate_bounds(plant, 100.0, 300.0, 20.0, 20.0)


def test_iff_brute_force(plant):
    rng = np.random.default_rng(7)
    for _ in range(20):
        lam, T = rng.uniform(50, 600), rng.uniform(2, 60)
        samples = lam * xi(plant, T, np.linspace(0.0, T, 10001))
        inside = samples.min() >= CORRIDOR.ybar_min and samples.max() <= CORRIDOR.ybar_max
        res = iff_check(plant, CORRIDOR, CycleSpec(lam, T), rtol=0.0)
        if res.iff_holds != inside:
            # only possible when an edge is grazed within grid resolution
            margin = min(abs(samples.min() / CORRIDOR.ybar_min - 1), abs(samples.max() / CORRIDOR.ybar_max - 1))
            assert margin < 1e-6


def test_lambda_opt_is_minimal(plant):
    res = iff_check(plant, CORRIDOR, CycleSpec(300.0, 30.0))
    assert res.ratio_ok
    lam_opt = res.lambda_opt
    assert iff_check(plant, CORRIDOR, CycleSpec(lam_opt, 30.0), rtol=1e-12).iff_holds
    assert not iff_check(plant, CORRIDOR, CycleSpec(lam_opt * (1 - 1e-6), 30.0), rtol=0.0).iff_holds


def test_ratio_test_matches_existence(plant):
    # some dose is feasible at T iff the kernel ratio fits inside the band ratio
    for T in (10.0, 30.0, 37.0, 39.0, 60.0):
        res = iff_check(plant, CORRIDOR, CycleSpec(1.0, T))
        at_opt = iff_check(plant, CORRIDOR, CycleSpec(res.lambda_opt, T), rtol=1e-12)
        assert res.ratio_ok == at_opt.iff_holds


def test_assess_report(plant):
    rep = assess(plant, CORRIDOR, CycleSpec(300.0, 20.0))
    assert rep.in_necessary_interval
    assert rep.sufficient_simple is None
    assert not rep.iff_holds
