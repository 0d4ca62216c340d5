from optomech.schemas.params import ModelParams, SidebandSpec
from optomech.schemas.report import DeviationReport, SuiteReport
from optomech.schemas.run_config import RunConfig

__all__ = [
    "ModelParams",
    "SidebandSpec",
    "DeviationReport",
    "SuiteReport",
    "RunConfig",
]
