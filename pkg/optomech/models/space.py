import enum
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from optomech.core.exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    InvalidSpaceError,
)

HERMITIAN_TOL = 1e-12


class Subsystem(str, enum.Enum):
    QUBIT = "qubit"
    CAVITY = "cavity"
    MECH = "mech"


@dataclass(frozen=True)
class HilbertSpace:
    """Truncated qubit ⊗ cavity ⊗ mechanical space (qubit factor optional)."""

    n_cavity: int = 8
    n_mech: int = 24
    has_qubit: bool = False

    def __post_init__(self):
        if self.n_cavity < 2:
            raise InvalidSpaceError(f"n_cavity={self.n_cavity} must be >= 2")
        if self.n_mech < 2:
            raise InvalidSpaceError(f"n_mech={self.n_mech} must be >= 2")

    @property
    def factors(self) -> Tuple[Subsystem, ...]:
        if self.has_qubit:
            return (Subsystem.QUBIT, Subsystem.CAVITY, Subsystem.MECH)
        return (Subsystem.CAVITY, Subsystem.MECH)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(self.factor_dim(f) for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def factor_dim(self, which) -> int:
        which = Subsystem(which)
        if which is Subsystem.QUBIT:
            if not self.has_qubit:
                raise InvalidSpaceError("space has no qubit factor")
            return 2
        if which is Subsystem.CAVITY:
            return self.n_cavity
        return self.n_mech

    def with_guard(self, mech: int = 0, cavity: int = 0) -> "HilbertSpace":
        return HilbertSpace(self.n_cavity + cavity, self.n_mech + mech, self.has_qubit)

    def with_qubit(self, has_qubit: bool = True) -> "HilbertSpace":
        return HilbertSpace(self.n_cavity, self.n_mech, has_qubit)

    def level_grids(self):
        """Cavity and mechanical excitation of every basis index."""
        shape = self.dims
        grids = np.indices(shape).reshape(len(shape), -1)
        return grids[-2], grids[-1]

    def interior_indices(self, keep_cav: int, keep_mech: int) -> np.ndarray:
        cav, mech = self.level_grids()
        return np.flatnonzero((cav < keep_cav) & (mech < keep_mech))

    def __str__(self):
        label = "x".join(str(d) for d in self.dims)
        return f"HilbertSpace({label})"


Scalar = Union[int, float, complex, np.number]


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    space: HilbertSpace
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatchError((self.space.dim, self.space.dim), entries.shape)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls, space: HilbertSpace) -> "OperatorMatrix":
        return cls(space, np.eye(space.dim))

    @classmethod
    def zeros(cls, space: HilbertSpace) -> "OperatorMatrix":
        return cls(space, np.zeros((space.dim, space.dim)))

    @classmethod
    def diagonal(cls, space: HilbertSpace, values) -> "OperatorMatrix":
        return cls(space, np.diag(np.asarray(values, dtype=np.complex128)))

    def _check(self, other: "OperatorMatrix"):
        if other.space != self.space:
            raise DimensionMismatchError(self.space, other.space, "operand space")

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T)

    def __add__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.space, self.entries + other.entries)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.space, self.entries - other.entries)
        return NotImplemented

    def __neg__(self):
        return OperatorMatrix(self.space, -self.entries)

    def __mul__(self, scalar: Scalar):
        if isinstance(scalar, OperatorMatrix):
            return NotImplemented
        return OperatorMatrix(self.space, self.entries * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar):
        return OperatorMatrix(self.space, self.entries / scalar)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.space, self.entries @ other.entries)
        return NotImplemented

    def commutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self @ other - other @ self

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_defect() < tol

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def restrict(self, space: HilbertSpace) -> "OperatorMatrix":
        """Crop to a smaller space with the same factors (drops guard levels)."""
        if space.has_qubit != self.space.has_qubit:
            raise DimensionMismatchError(self.space, space, "restriction target")
        if space.n_cavity > self.space.n_cavity or space.n_mech > self.space.n_mech:
            raise DimensionMismatchError(self.space, space, "restriction target")
        idx = self.space.interior_indices(space.n_cavity, space.n_mech)
        return OperatorMatrix(space, self.entries[np.ix_(idx, idx)])

    def block(self, cavity_level: int) -> np.ndarray:
        """Mechanical (and qubit) block at a fixed photon number."""
        cav, _ = self.space.level_grids()
        idx = np.flatnonzero(cav == cavity_level)
        return self.entries[np.ix_(idx, idx)]


class StateKind(str, enum.Enum):
    KET = "ket"
    DENSITY = "density"


@dataclass(frozen=True, eq=False)
class QuantumState:
    space: HilbertSpace
    kind: StateKind
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        kind = StateKind(self.kind)
        dim = self.space.dim
        if kind is StateKind.KET:
            if data.shape != (dim,):
                raise DimensionMismatchError((dim,), data.shape, "ket")
            norm = np.linalg.norm(data)
            if abs(norm - 1.0) > 1e-12:
                raise InvalidArgumentError(f"ket norm {norm!r} differs from 1")
        else:
            if data.shape != (dim, dim):
                raise DimensionMismatchError((dim, dim), data.shape, "density matrix")
            trace = np.trace(data)
            if abs(trace - 1.0) > 1e-12:
                raise InvalidArgumentError(f"density trace {trace!r} differs from 1")
            if np.max(np.abs(data - data.conj().T)) > 1e-12:
                raise InvalidArgumentError("density matrix is not Hermitian")
            min_eig = np.linalg.eigvalsh(0.5 * (data + data.conj().T))[0]
            if min_eig < -1e-10:
                raise InvalidArgumentError(f"density matrix has eigenvalue {min_eig!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_ket(cls, space: HilbertSpace, vector) -> "QuantumState":
        return cls(space, StateKind.KET, vector)

    @classmethod
    def from_density(cls, space: HilbertSpace, matrix) -> "QuantumState":
        return cls(space, StateKind.DENSITY, matrix)

    def density(self) -> np.ndarray:
        if self.kind is StateKind.KET:
            return np.outer(self.data, self.data.conj())
        return self.data

    def expect(self, op: OperatorMatrix) -> complex:
        if self.kind is StateKind.KET:
            return complex(self.data.conj() @ op.entries @ self.data)
        return complex(np.trace(op.entries @ self.data))
