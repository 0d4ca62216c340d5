from optomech.models.space import (
    HilbertSpace,
    OperatorMatrix,
    QuantumState,
    StateKind,
    Subsystem,
)

__all__ = ["HilbertSpace", "OperatorMatrix", "QuantumState", "StateKind", "Subsystem"]
