import numpy as np
import pytest

from impulse_dose import CycleSpec, DesignRequest, PlantParams, synthesize
from impulse_dose.bifurcation import SweepConfig, classify_saturation, detect_period, sweep
from impulse_dose.design import Bounds
from impulse_dose.errors import InvalidParameter


def test_detect_period_synthetic():
    x = np.tile([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]], (20, 1))
    assert detect_period(x, 8) == 3
    assert detect_period(np.ones(20), 8) == 1
    rng = np.random.default_rng(0)
    assert detect_period(rng.uniform(size=(64, 3)), 16) is None


def test_detect_period_needs_samples():
    with pytest.raises(InvalidParameter):
        detect_period(np.ones((10, 3)), 8)


@pytest.mark.parametrize(
    "kw",
    [
        dict(parameter="beta"),
        dict(lo=0.05, hi=0.03),
        dict(steps=0),
        dict(max_period=100, record_impulses=128),
        dict(coordinate=3),
        dict(transient_impulses=-1),
    ],
)
def test_sweep_config_validation(kw):
    with pytest.raises(InvalidParameter):
        SweepConfig(**kw)


def test_single_step():
    assert SweepConfig(steps=1, lo=0.03, hi=0.03).values().tolist() == [0.03]


def test_genuine_period_two():
    res = synthesize(DesignRequest(spec=CycleSpec(300.0, 20.0), f_slope=0.0, phi_slope=6.0))
    cfg = SweepConfig(lo=0.0374, hi=0.0374, steps=1, transient_impulses=400, record_impulses=64, max_period=16)
    row = sweep(PlantParams(), res.modulation, cfg).rows[0]
    assert row.period == 2
    assert sorted(row.points[:, 0]) == pytest.approx([239.37, 326.81], abs=0.01)
    assert classify_saturation(row) == (False, False)


def test_period_four_with_saturation():
    req = DesignRequest(spec=CycleSpec(300.0, 20.0), f_slope=0.0, phi_slope=6.0, bounds=Bounds(phi_lo=15.0, phi_hi=25.0))
    res = synthesize(req)
    cfg = SweepConfig(lo=0.0374, hi=0.0374, steps=1, transient_impulses=400, record_impulses=64, max_period=16)
    row = sweep(PlantParams(), res.modulation, cfg).rows[0]
    assert row.period == 4
    assert classify_saturation(row).period


def test_workers_preserve_order(paper_design):
    cfg = SweepConfig(steps=6, transient_impulses=100, record_impulses=32, max_period=8)
    a = sweep(PlantParams(), paper_design.modulation, cfg)
    b = sweep(PlantParams(), paper_design.modulation, cfg, workers=3)
    assert [r.value for r in a.rows] == [r.value for r in b.rows]
    for ra, rb in zip(a.rows, b.rows):
        np.testing.assert_array_equal(ra.points, rb.points)


def test_gamma_sweep_keeps_controller(paper_design):
    cfg = SweepConfig(parameter="gamma", lo=2.6677, hi=2.6677, steps=1,
                      transient_impulses=300, record_impulses=32, max_period=8)
    row = sweep(PlantParams(), paper_design.modulation, cfg).rows[0]
    assert row.period == 1
    np.testing.assert_allclose(row.points[0], [269.5974, 84.5819, 13.6249], rtol=1e-5)
