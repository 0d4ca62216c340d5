from optomech.core.logging import setup_logging
from optomech.core.exceptions import (
    OptomechError,
    InvalidSpaceError,
    DimensionMismatchError,
    InvalidArgumentError,
    InvalidBufferError,
    NumericalOverflowError,
    IntegrationError,
    QuadratureConvergenceError,
    UnknownModelError,
    UnknownSuiteError,
    StateSpecError,
    OutputWriteError,
)

__all__ = [
    "setup_logging",
    "OptomechError",
    "InvalidSpaceError",
    "DimensionMismatchError",
    "InvalidArgumentError",
    "InvalidBufferError",
    "NumericalOverflowError",
    "IntegrationError",
    "QuadratureConvergenceError",
    "UnknownModelError",
    "UnknownSuiteError",
    "StateSpecError",
    "OutputWriteError",
]
