import json

import pytest
import yaml

from impulse_dose.cli import main
from impulse_dose.config import RunConfig, defaults_yaml
from impulse_dose.output import BIFURCATION_HEADER, DENSE_HEADER, EVENTS_HEADER


def write_cfg(tmp_path, data):
    p = tmp_path / "run.yaml"
    p.write_text(yaml.safe_dump(data))
    return str(p)


SMALL_SWEEP = {"sweep": {"steps": 3, "transient_impulses": 50, "record_impulses": 16, "max_period": 4}}


def test_print_defaults_round_trip(capsys):
    assert main(["--print-defaults"]) == 0
    text = capsys.readouterr().out
    assert text == defaults_yaml()
    RunConfig.model_validate(yaml.safe_load(text))


def test_design_command(tmp_path, capsys):
    assert main(["design", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "design_report.json").read_text())
    assert report["modulation"]["k2"] == pytest.approx(-0.7119, abs=1e-3)
    assert report["schur_stable"] is True
    assert report["corridor"]["compliant"] is False
    assert "eigenvalues" in capsys.readouterr().out


def test_design_unstable_exit_one(tmp_path):
    cfg = write_cfg(tmp_path, {"design": {"f_slope": 0.0, "phi_slope": 6.0}})
    assert main(["design", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_feasibility_exit_codes(tmp_path):
    assert main(["feasibility", "--out", str(tmp_path / "a")]) == 1
    cfg = write_cfg(tmp_path, {"cycle": {"lambda": 415.8412, "period": 37.3834}})
    assert main(["feasibility", "--config", cfg, "--out", str(tmp_path / "b")]) == 0
    report = json.loads((tmp_path / "b" / "feasibility_report.json").read_text())
    assert report["iff_holds"] is True


def test_simulate_outputs(tmp_path):
    assert main(["simulate", "--out", str(tmp_path), "--svg"]) == 0
    events = (tmp_path / "events.csv").read_text().splitlines()
    dense = (tmp_path / "dense.csv").read_text().splitlines()
    assert events[0] == EVENTS_HEADER
    assert dense[0] == DENSE_HEADER
    assert len(events) == 21
    assert events[1].split(",")[2] == "450"
    assert (tmp_path / "simulation.svg").read_text().startswith("<svg")


def test_simulate_byte_stable(tmp_path):
    main(["simulate", "--out", str(tmp_path / "a")])
    main(["simulate", "--out", str(tmp_path / "b")])
    for name in ("events.csv", "dense.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_simulate_zero_horizon(tmp_path):
    cfg = write_cfg(tmp_path, {"scenario": {"impulses": 0}})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "events.csv").read_text() == EVENTS_HEADER + "\n"
    assert (tmp_path / "o" / "dense.csv").read_text() == DENSE_HEADER + "\n"


def test_simulate_explicit_modulation(tmp_path):
    cfg = write_cfg(tmp_path, {
        "modulation": {"k1": 21.5133, "k2": -0.7119, "k3": 299.2173, "k4": 0.3682},
        "cycle": {"lambda": 300, "period": 20},
        "scenario": {"x0": "fixed_point", "impulses": 5},
    })
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "events.csv").read_text().splitlines()[1:]
    for r in rows:
        assert float(r.split(",")[2]) == pytest.approx(300.0, abs=1e-2)


def test_bifurcate(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_SWEEP)
    assert main(["bifurcate", "--config", cfg, "--out", str(tmp_path / "o"), "--svg"]) == 0
    lines = (tmp_path / "o" / "bifurcation.csv").read_text().splitlines()
    assert lines[0] == BIFURCATION_HEADER
    assert len(lines) == 4
    summary = json.loads((tmp_path / "o" / "bifurcation_summary.json").read_text())
    assert [r["period"] for r in summary] == [1, 1, 1]
    assert (tmp_path / "o" / "bifurcation.svg").exists()


@pytest.mark.parametrize(
    "data",
    [
        {"plant": {"alpha": 0.5}},
        {"plant": {"colour": "red"}},
        {"design": {}, "modulation": {"k1": 1, "k2": 0, "k3": 1, "k4": 0}},
        {"modulation": {"k1": 1, "k2": 0.5, "k3": 1, "k4": 0}, "cycle": {"lambda": 1, "period": 1}},
        {"corridor": {"y_min": 10, "y_max": 2}},
    ],
)
def test_invalid_config_exit_two(tmp_path, capsys, data):
    cfg = write_cfg(tmp_path, data)
    cmd = "simulate" if "modulation" in data else "design"
    if "corridor" in data:
        cmd = "feasibility"
    assert main([cmd, "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "config_invalid"
    assert not (tmp_path / "o").exists()


def test_malformed_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("plant: [unclosed\n")
    assert main(["design", "--config", str(p)]) == 2


def test_missing_config_is_io(tmp_path):
    assert main(["design", "--config", str(tmp_path / "nope.yaml")]) == 3


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["design", "--out", str(blocker / "sub")]) == 3


def test_no_command():
    assert main([]) == 2
