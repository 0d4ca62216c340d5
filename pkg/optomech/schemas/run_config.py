import json
import math
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import Field, field_validator, model_validator

from optomech.config import settings
from optomech.schemas.params import ModelParams

ObservableName = Literal["n_a", "n_b", "sz", "x_b"]


class RunConfig(ModelParams):
    n_cavity: int = Field(default=settings.n_cavity, ge=2)
    n_mech: int = Field(default=settings.n_mech, ge=2)
    has_qubit: bool = False
    buffer_cav: int = Field(default=settings.buffer_cav, ge=0)
    buffer_mech: int = Field(default=settings.buffer_mech, ge=0)
    guard_mech: int = Field(default=settings.guard_mech, ge=0)

    t_max: float = Field(default=2 * math.pi, gt=0, description="Propagation horizon")
    dt: Optional[float] = Field(default=None, description="Step; defaults to 1e-3 * 2pi/omega_m")
    time: float = Field(default=0.0, description="Evaluation time for time-dependent models")
    record_every: int = Field(default=10, ge=1)
    eig_every: int = Field(default=10, ge=1)
    observables: List[ObservableName] = Field(default_factory=lambda: ["n_a", "n_b"])
    displacement_method: Literal["expm", "laguerre"] = "expm"

    seed: int = Field(default=7)
    out_dir: str = Field(default=settings.output_dir)

    closed_form_states: int = Field(default=10, ge=1)
    closed_form_support: int = Field(default=6, ge=1)
    sideband_alphas: List[float] = Field(default_factory=lambda: [0.0, 0.05, 0.1, 0.2])
    sideband_orders: List[int] = Field(default_factory=lambda: [0, 1, 2])
    fidelity_periods: float = Field(default=10.0, gt=0)

    model_config = {"populate_by_name": True, "frozen": True, "extra": "forbid"}

    @field_validator("dt")
    @classmethod
    def dt_positive(cls, v):
        if v is not None and v <= 0:
            raise ValueError("dt must be positive")
        return v

    @field_validator("sideband_orders")
    @classmethod
    def orders_non_negative(cls, v):
        if any(s < 0 for s in v):
            raise ValueError("sideband orders must be non-negative")
        return v

    @model_validator(mode="after")
    def observables_fit_space(self):
        if "sz" in self.observables and not self.has_qubit:
            raise ValueError("observable 'sz' requires has_qubit = true")
        return self

    @property
    def step(self) -> float:
        if self.dt is not None:
            return self.dt
        return 1e-3 * 2 * math.pi / self.omega_m

    @property
    def params(self) -> ModelParams:
        fields = ModelParams.model_fields.keys()
        return ModelParams(**{k: getattr(self, k) for k in fields})

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(Path(path), "r", encoding="utf-8") as fh:
            return cls.model_validate(json.load(fh))

    def with_seed_override(self) -> "RunConfig":
        if settings.seed is None:
            return self
        return self.model_copy(update={"seed": settings.seed})
