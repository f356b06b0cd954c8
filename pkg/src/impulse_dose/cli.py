"""``impulse-dose`` command line tool.

Exit codes: 0 success / feasible, 1 analysis negative, 2 invalid
configuration, 3 I/O failure.  Errors are reported on stderr as one JSON
record.  Every result is computed before the first file is written.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import config as config_mod
from . import output
from .bifurcation import sweep
from .cycle import fixed_point
from .design import synthesize, verify_design
from .errors import ImpulseDoseError
from .feasibility import assess, simple_period_threshold
from .model import build_plant, hill, hill_deriv
from .modulation import validate
from .sim import DEFAULT_BOLUS, simulate

log = logging.getLogger("impulse_dose")

EXIT_OK, EXIT_NEGATIVE, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _error(kind: str, message: str, details=None) -> None:
    record = {"error": kind, "message": message}
    if details:
        record["details"] = details
    print(json.dumps(record), file=sys.stderr)


def _controller(cfg: config_mod.RunConfig):
    """Return ``(plant, modulation, design_result_or_None)``."""
    mod = cfg.explicit_modulation()
    if mod is not None:
        report = validate(mod)
        if not report.ok:
            raise ConfigError("; ".join(report.violations))
        return build_plant(cfg.plant.build()), mod, None
    result = synthesize(cfg.design_request())
    return result.plant, result.modulation, result


def cmd_design(cfg: config_mod.RunConfig) -> tuple[int, dict[str, str], list[str]]:
    if cfg.modulation is not None:
        raise ConfigError("the design command needs a 'design' request, not explicit 'modulation'")
    result = synthesize(cfg.design_request())
    report = validate(result.modulation)
    if not report.ok:
        raise ConfigError("; ".join(report.violations))
    check = verify_design(result, cfg.corridor_obj())
    m, c = result.modulation, result.cycle
    h = result.request.hill
    data = {
        "cycle": {"lambda": c.spec.lam, "T": c.spec.period},
        "slopes": {"F_prime": result.request.f_slope, "Phi_prime": result.request.phi_slope},
        "modulation": {"k1": m.k1, "k2": m.k2, "k3": m.k3, "k4": m.k4,
                       "phi_lo": m.phi_lo, "phi_hi": m.phi_hi, "f_lo": m.f_lo, "f_hi": m.f_hi},
        "fixed_point": {"pre_jump": c.pre_jump, "post_jump": c.post_jump, "ybar0": c.ybar0,
                        "hill_ybar0": hill(h, c.ybar0), "hill_slope_ybar0": hill_deriv(h, c.ybar0)},
        "jacobian": c.jacobian,
        "eigenvalues": [complex(e) for e in c.eigenvalues],
        "spectral_radius": c.spectral_radius,
        "schur_stable": c.schur_stable,
        "corridor": {
            "y_min": cfg.corridor.y_min, "y_max": cfg.corridor.y_max,
            "compliant": check.compliant,
            "ybar_range": [check.output.ybar_min, check.output.ybar_max],
            "y_range": [check.output.y_min, check.output.y_max],
            "lambda_opt": check.iff.lambda_opt,
            "flags": check.flags,
        },
        "closed_loop_residual": check.closed_loop_residual,
        "warnings": result.warnings,
    }
    summary = [
        f"k1={m.k1:.4f} k2={m.k2:.4f} k3={m.k3:.4f} k4={m.k4:.4f}",
        "X=(" + ", ".join(f"{x:.4f}" for x in c.pre_jump) + f")  ybar0={c.ybar0:.4f}",
        "eigenvalues: " + ", ".join(f"{e:.4f}" for e in c.eigenvalues)
        + f"  (radius {c.spectral_radius:.4f}, {'stable' if c.schur_stable else 'UNSTABLE'})",
        f"y over the cycle: [{check.output.y_min:.4f}, {check.output.y_max:.4f}] %"
        + ("  corridor ok" if check.compliant else "  corridor violated"),
        *check.flags,
        *(f"warning: {w}" for w in result.warnings),
    ]
    code = EXIT_OK if c.schur_stable else EXIT_NEGATIVE
    return code, {"design_report.json": output.to_json(data)}, summary


def cmd_feasibility(cfg: config_mod.RunConfig):
    plant = build_plant(cfg.plant.build())
    corridor = cfg.corridor_obj()
    spec = cfg.cycle_spec()
    rep = assess(plant, corridor, spec, cfg.lambda_max)
    data = {
        "cycle": {"lambda": spec.lam, "T": spec.period},
        "corridor": {"y_min": corridor.y_min, "y_max": corridor.y_max,
                     "ybar_min": corridor.ybar_min, "ybar_max": corridor.ybar_max},
        "necessary_interval": rep.necessary_interval,
        "in_necessary_interval": rep.in_necessary_interval,
        "sufficient_simple": rep.sufficient_simple,
        "simple_period_threshold": simple_period_threshold(plant, corridor),
        "iff_holds": rep.iff_holds,
        "lambda_opt": rep.lambda_opt,
        "ratio": rep.ratio,
        "corridor_ratio": rep.corridor_ratio,
        "ybar_attained": [rep.ybar_min_attained, rep.ybar_max_attained],
    }
    lo, hi = rep.necessary_interval or (float("nan"), float("nan"))
    summary = [
        f"necessary interval at T={spec.period:g}: {lo:.4f} <= lambda <= {hi:.4f}"
        + (" (inside)" if rep.in_necessary_interval else " (outside)"),
        f"minimal dose lambda_opt={rep.lambda_opt:.4f}; ratio {rep.ratio:.6f} vs corridor {rep.corridor_ratio:.6f}",
        f"lambda={spec.lam:g}, T={spec.period:g}: corridor " + ("satisfied" if rep.iff_holds else "violated"),
    ]
    code = EXIT_OK if rep.iff_holds else EXIT_NEGATIVE
    return code, {"feasibility_report.json": output.to_json(data)}, summary


def cmd_simulate(cfg: config_mod.RunConfig, svg: bool = False):
    plant, mod, result = _controller(cfg)
    sc = cfg.scenario
    if sc.x0 == "zero":
        x0 = np.zeros(3)
    elif sc.x0 == "fixed_point":
        x0 = result.cycle.pre_jump if result is not None else fixed_point(plant, cfg.cycle_spec()).pre_jump
    else:
        x0 = np.array(sc.x0, dtype=float)
    bolus = sc.bolus
    if bolus is None and sc.x0 == "zero":
        bolus = DEFAULT_BOLUS
    if sc.impulses is None and sc.t_end is None:
        raise ConfigError("scenario needs 'impulses' or 't_end'")
    trace = None
    if not sc.empty:
        trace = simulate(plant, mod, x0, n_impulses=sc.impulses, t_end=sc.t_end,
                         dense_dt=sc.dense_dt, first_dose=bolus)
    files = {"events.csv": output.events_csv(trace), "dense.csv": output.dense_csv(trace)}
    if svg and trace is not None:
        files["simulation.svg"] = output.trace_svg(trace)
    n = 0 if trace is None else len(trace.events)
    summary = [f"{n} firings simulated"]
    if trace is not None and len(trace.dense):
        y = trace.dense[:, 5]
        summary.append(f"y(t) in [{y.min():.4f}, {y.max():.4f}] %")
        summary.append(f"last firing: lambda={trace.events[-1].lam:.4f}, T={trace.events[-1].period:.4f}")
    return EXIT_OK, files, summary


def cmd_bifurcate(cfg: config_mod.RunConfig, svg: bool = False):
    _, mod, _ = _controller(cfg)
    sweep_cfg = cfg.sweep.build()
    diagram = sweep(cfg.plant.build(), mod, sweep_cfg)
    files = {
        "bifurcation.csv": output.bifurcation_csv(diagram),
        "bifurcation_summary.json": output.to_json(output.bifurcation_summary(diagram)),
    }
    if svg:
        files["bifurcation.svg"] = output.bifurcation_svg(diagram, sweep_cfg.coordinate)
    counts: dict[str, int] = {}
    for row in diagram.rows:
        counts[row.label] = counts.get(row.label, 0) + 1
    summary = [f"{diagram.parameter} sweep, {len(diagram.rows)} values; rows per period: "
               + ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))]
    return EXIT_OK, files, summary


COMMANDS = {
    "design": cmd_design,
    "feasibility": cmd_feasibility,
    "simulate": cmd_simulate,
    "bifurcate": cmd_bifurcate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impulse-dose",
        description="Pulse-modulated dosing feedback: design, feasibility, simulation, bifurcation.",
    )
    parser.add_argument("--print-defaults", action="store_true",
                        help="print the default configuration and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("command", nargs="?", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="YAML or JSON run configuration")
    parser.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    parser.add_argument("--svg", action="store_true", help="also write an SVG plot")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.print_defaults:
        sys.stdout.write(config_mod.defaults_yaml())
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        _error("usage", "a command is required")
        return EXIT_CONFIG

    try:
        cfg = config_mod.load(args.config) if args.config else config_mod.RunConfig()
    except OSError as exc:
        _error("io", f"cannot read config: {exc}")
        return EXIT_IO
    except ValidationError as exc:
        details = [{"loc": ".".join(map(str, e["loc"])), "msg": e["msg"]} for e in exc.errors()]
        _error("config_invalid", "configuration failed validation", details)
        return EXIT_CONFIG
    except ValueError as exc:  # yaml.YAMLError is not a ValueError
        _error("config_invalid", str(exc))
        return EXIT_CONFIG
    except Exception as exc:  # malformed YAML
        _error("config_invalid", f"cannot parse config: {exc}")
        return EXIT_CONFIG

    fn = COMMANDS[args.command]
    kwargs = {"svg": args.svg} if args.command in ("simulate", "bifurcate") else {}
    try:
        code, files, summary = fn(cfg, **kwargs)
    except (ConfigError, ImpulseDoseError, ValueError) as exc:
        _error("config_invalid", str(exc))
        return EXIT_CONFIG

    out_dir = args.out if args.out is not None else Path(cfg.output.dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            output.write_text(out_dir / name, text)
    except OSError as exc:
        _error("io", f"cannot write output: {exc}")
        return EXIT_IO
    log.debug("wrote %s to %s", sorted(files), out_dir)

    for line in summary:
        print(line)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
