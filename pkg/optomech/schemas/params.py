import logging
from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

logger = logging.getLogger(__name__)

SMALL_DISPLACEMENT_LIMIT = 0.3


class ModelParams(BaseModel):
    omega_c: float = Field(default=100.0, description="Cavity frequency")
    omega_m: float = Field(default=1.0, description="Mechanical frequency (unit of frequency)")
    g: float = Field(default=0.1, description="Optomechanical coupling")
    Omega: float = Field(default=0.2, description="Pump strength")
    omega_p: float = Field(default=99.0, description="Pump frequency")
    omega_0: float = Field(default=100.2, description="Qubit transition frequency")
    lambda_: float = Field(default=0.1, alias="lambda", description="Atom-field coupling")
    gamma: float = Field(default=0.05, ge=0, description="Mechanical decay rate")
    nbar: float = Field(default=1.0, ge=0, description="Thermal mean photon number")
    s: int = Field(default=1, ge=0, description="Sideband index")
    sideband_sign: Literal[1, -1] = Field(default=1, description="Detuning sign of the sideband")

    model_config = {
        "populate_by_name": True,
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "omega_c": 100.0,
                "omega_m": 1.0,
                "g": 0.1,
                "Omega": 0.2,
                "omega_p": 99.0,
                "omega_0": 100.2,
                "lambda": 0.1,
                "gamma": 0.05,
                "nbar": 1.0,
                "s": 1,
                "sideband_sign": 1,
            }
        },
    }

    @property
    def delta_p(self) -> float:
        return self.omega_c - self.omega_p

    @property
    def delta(self) -> float:
        return self.omega_0 - self.omega_c

    @property
    def alpha(self) -> float:
        if self.omega_m <= 0:
            raise ValueError("omega_m must be positive to form alpha = g/omega_m")
        return self.g / self.omega_m

    @property
    def kerr(self) -> float:
        return self.g ** 2 / self.omega_m

    def replace(self, **changes) -> "ModelParams":
        if "lambda" in changes:
            changes["lambda_"] = changes.pop("lambda")
        return self.model_copy(update=changes)

    def to_json_dict(self) -> dict:
        return self.model_dump(by_alias=True)


class SidebandSpec(BaseModel):
    s: int = Field(..., ge=0, description="Sideband order")
    sign: Literal[1, -1] = Field(default=1, description="Detuning delta_p = sign * s * omega_m")
    alpha: float = Field(..., description="Displacement parameter g/omega_m")

    model_config = {"frozen": True}

    @field_validator("alpha")
    @classmethod
    def alpha_non_negative(cls, v):
        if v < 0:
            raise ValueError("alpha must be non-negative")
        return v

    @model_validator(mode="after")
    def warn_outside_regime(self):
        if self.alpha >= SMALL_DISPLACEMENT_LIMIT:
            logger.warning(
                f"alpha={self.alpha} is outside the small-displacement regime "
                f"(alpha < {SMALL_DISPLACEMENT_LIMIT}); the sideband RWA may not hold"
            )
        return self

    @property
    def harmonic(self) -> int:
        return self.sign * self.s

    @classmethod
    def from_params(cls, params: ModelParams) -> "SidebandSpec":
        return cls(s=params.s, sign=params.sideband_sign, alpha=params.alpha)
