from typing import Optional
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    app_name: str = Field(default="Optomech Operator Toolkit")
    app_version: str = Field(default="1.0.0")
    environment: str = Field(default="development")

    log_level: str = Field(default="INFO")

    seed: Optional[int] = Field(default=None, description="Overrides the run config seed")
    output_dir: str = Field(default="results")

    n_cavity: int = Field(default=8, ge=2)
    n_mech: int = Field(default=24, ge=2)
    buffer_cav: int = Field(default=1, ge=0)
    buffer_mech: int = Field(default=4, ge=0)
    guard_mech: int = Field(default=16, ge=0)

    quadrature_points: int = Field(default=64, ge=8)
    identity_tolerance: float = Field(default=1e-10, gt=0)

    model_config = SettingsConfigDict(
        env_prefix="OPTOMECH_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("environment")
    @classmethod
    def validate_environment(cls, v):
        allowed = ["development", "testing", "production"]
        if v not in allowed:
            raise ValueError(f"Environment must be one of {allowed}")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        allowed = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in allowed:
            raise ValueError(f"Log level must be one of {allowed}")
        return v.upper()


settings = Settings()
