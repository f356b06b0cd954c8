"""Run configuration read by the command line tool.

One YAML (or JSON) file describes a whole run.  Every section is optional
and falls back to the nominal atracurium example.  The controller is given
either as a ``design`` request or as explicit ``modulation`` coefficients;
giving both is an error, giving neither selects the default design request.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import bifurcation as bif_mod
from . import design as design_mod
from . import feasibility as feas_mod
from . import model as model_mod
from . import modulation as mod_mod
from .cycle import CycleSpec


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class PlantSection(_Section):
    alpha: float = 0.0374
    v: tuple[float, float, float] = (1.0, 4.0, 10.0)
    g1: Optional[float] = None

    def build(self) -> model_mod.PlantParams:
        return model_mod.PlantParams(alpha=self.alpha, v=self.v, g1=self.g1)


class HillSection(_Section):
    c50: float = 3.2425
    gamma: float = 2.6677

    def build(self) -> model_mod.HillNonlinearity:
        return model_mod.HillNonlinearity(c50=self.c50, gamma=self.gamma)


class BoundsSection(_Section):
    phi_lo: float = 10.0
    phi_hi: float = 40.0
    f_lo: float = 0.0
    f_hi: float = 500.0

    def build(self) -> design_mod.Bounds:
        return design_mod.Bounds(**self.model_dump())


class CycleSection(_Section):
    lam: float = Field(alias="lambda")
    period: float

    def build(self) -> CycleSpec:
        return CycleSpec(self.lam, self.period)


class DesignSection(CycleSection):
    lam: float = Field(300.0, alias="lambda")
    period: float = 20.0
    f_slope: float = -0.15
    phi_slope: float = 0.29


class ModulationSection(_Section):
    k1: float
    k2: float
    k3: float
    k4: float


class CorridorSection(_Section):
    y_min: float = 2.0
    y_max: float = 10.0


class ScenarioSection(_Section):
    x0: Union[Literal["zero", "fixed_point"], tuple[float, float, float]] = "zero"
    # None: 450 ug induction dose when starting from "zero", else the modulated dose
    bolus: Optional[float] = None
    impulses: Optional[int] = 20
    t_end: Optional[float] = None
    dense_dt: float = 0.05

    @field_validator("impulses")
    @classmethod
    def _non_negative(cls, v):
        if v is not None and v < 0:
            raise ValueError("impulses must be non-negative")
        return v

    @property
    def empty(self) -> bool:
        return self.impulses == 0 or (self.t_end is not None and self.t_end <= 0)


class SweepSection(_Section):
    parameter: Literal["alpha", "gamma"] = "alpha"
    lo: float = 0.0274
    hi: float = 0.04824
    steps: int = 60
    transient_impulses: int = 500
    record_impulses: int = 128
    max_period: int = 32
    tol: float = 1e-6
    coordinate: Literal["x1", "x2", "x3"] = "x1"

    def build(self) -> bif_mod.SweepConfig:
        d = self.model_dump()
        d["coordinate"] = int(self.coordinate[1]) - 1
        return bif_mod.SweepConfig(**d)


class OutputSection(_Section):
    dir: str = "out"


class RunConfig(_Section):
    plant: PlantSection = PlantSection()
    hill: HillSection = HillSection()
    bounds: BoundsSection = BoundsSection()
    design: Optional[DesignSection] = None
    modulation: Optional[ModulationSection] = None
    corridor: CorridorSection = CorridorSection()
    cycle: Optional[CycleSection] = None
    lambda_max: Optional[float] = None
    scenario: ScenarioSection = ScenarioSection()
    sweep: SweepSection = SweepSection()
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _one_controller(self):
        if self.design is not None and self.modulation is not None:
            raise ValueError("give either 'design' or 'modulation', not both")
        return self

    def design_request(self) -> design_mod.DesignRequest:
        d = self.design if self.design is not None else DesignSection()
        return design_mod.DesignRequest(
            spec=d.build(),
            f_slope=d.f_slope,
            phi_slope=d.phi_slope,
            bounds=self.bounds.build(),
            plant=self.plant.build(),
            hill=self.hill.build(),
        )

    def explicit_modulation(self) -> mod_mod.ModulationConfig | None:
        if self.modulation is None:
            return None
        return mod_mod.ModulationConfig(
            **self.modulation.model_dump(), **self.bounds.model_dump(), hill=self.hill.build()
        )

    def corridor_obj(self) -> feas_mod.Corridor:
        return feas_mod.Corridor(self.corridor.y_min, self.corridor.y_max, self.hill.build())

    def cycle_spec(self) -> CycleSpec:
        if self.cycle is not None:
            return self.cycle.build()
        if self.modulation is not None:
            raise ValueError("a 'cycle' section is required when the controller is given explicitly")
        return (self.design or DesignSection()).build()


def load(path: str | Path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError("config root must be a mapping")
    return RunConfig.model_validate(data)


def defaults_yaml() -> str:
    cfg = RunConfig(design=DesignSection())
    data = cfg.model_dump(by_alias=True, exclude={"modulation", "cycle"})
    for key, sec in data.items():
        if isinstance(sec, dict):
            data[key] = {k: list(v) if isinstance(v, tuple) else v for k, v in sec.items()}
    return yaml.safe_dump(data, sort_keys=False)
