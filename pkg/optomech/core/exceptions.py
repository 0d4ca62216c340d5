EXIT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2


class OptomechError(Exception):
    exit_code = EXIT_ERROR

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)


class InvalidSpaceError(OptomechError):
    def __init__(self, detail: str):
        super().__init__(f"Invalid Hilbert space: {detail}")


class DimensionMismatchError(OptomechError):
    def __init__(self, expected, got, what: str = "operator"):
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {got}")


class InvalidArgumentError(OptomechError):
    pass


class InvalidBufferError(OptomechError):
    def __init__(self, buffer: int, dimension: int, mode: str):
        super().__init__(
            f"Buffer {buffer} on the {mode} mode must be smaller than its dimension {dimension}"
        )


class NumericalOverflowError(OptomechError):
    pass


class IntegrationError(OptomechError):
    pass


class QuadratureConvergenceError(OptomechError):
    pass


class UnknownModelError(OptomechError):
    def __init__(self, model_id: str, valid):
        super().__init__(f"Unknown model '{model_id}'. Valid models: {', '.join(valid)}")


class UnknownSuiteError(OptomechError):
    def __init__(self, suite_id: str, valid):
        super().__init__(f"Unknown suite '{suite_id}'. Valid suites: {', '.join(valid)}")


class StateSpecError(OptomechError):
    def __init__(self, spec: str, reason: str):
        super().__init__(f"Invalid state spec '{spec}': {reason}")


class OutputWriteError(OptomechError):
    def __init__(self, path, reason: str):
        super().__init__(f"Cannot write '{path}': {reason}")
