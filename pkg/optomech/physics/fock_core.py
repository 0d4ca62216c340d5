"""Truncated Fock-space operator algebra.

Subsystem ordering is qubit ⊗ cavity ⊗ mechanical. Qubit basis: |e> = (1, 0),
|g> = (0, 1), so sigma_+ = |e><g|.
"""
import logging
import math
from typing import Dict, NamedTuple, Optional

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from optomech.core.exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    InvalidSpaceError,
    NumericalOverflowError,
)
from optomech.models.space import HilbertSpace, OperatorMatrix, QuantumState, Subsystem

logger = logging.getLogger(__name__)

DISPLACEMENT_METHODS = ("expm", "laguerre")


class Ladder(NamedTuple):
    a: OperatorMatrix
    adag: OperatorMatrix
    b: OperatorMatrix
    bdag: OperatorMatrix
    n_a: OperatorMatrix
    n_b: OperatorMatrix


class Pauli(NamedTuple):
    sz: OperatorMatrix
    sx: OperatorMatrix
    sy: OperatorMatrix
    sp: OperatorMatrix
    sm: OperatorMatrix


class SusskindGlogower(NamedTuple):
    V: OperatorMatrix
    Vdag: OperatorMatrix


# single-factor matrices

def annihilation(dimension: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dimension, dtype=float)), 1).astype(np.complex128)


def number(dimension: int) -> np.ndarray:
    return np.diag(np.arange(dimension, dtype=float)).astype(np.complex128)


def projector(dimension: int, level: int) -> np.ndarray:
    p = np.zeros((dimension, dimension), dtype=np.complex128)
    p[level, level] = 1.0
    return p


QUBIT_SP = np.array([[0, 1], [0, 0]], dtype=np.complex128)
QUBIT_SZ = np.diag([1.0, -1.0]).astype(np.complex128)
QUBIT_EXCITED = np.diag([1.0, 0.0]).astype(np.complex128)


def embed(op, which, space: HilbertSpace) -> OperatorMatrix:
    """Kronecker embedding of a single-factor operator into the full space."""
    which = Subsystem(which)
    if which not in space.factors:
        raise InvalidSpaceError(f"space has no {which.value} factor")
    op = np.asarray(op, dtype=np.complex128)
    target = space.factor_dim(which)
    if op.shape != (target, target):
        raise DimensionMismatchError((target, target), op.shape, f"{which.value} operator")
    full = np.ones((1, 1), dtype=np.complex128)
    for factor in space.factors:
        piece = op if factor is which else np.eye(space.factor_dim(factor))
        full = np.kron(full, piece)
    return OperatorMatrix(space, full)


def embed_product(space: HilbertSpace, **ops) -> OperatorMatrix:
    """Kronecker product of one operator per named factor (identity elsewhere)."""
    full = np.ones((1, 1), dtype=np.complex128)
    for factor in space.factors:
        piece = ops.get(factor.value)
        if piece is None:
            piece = np.eye(space.factor_dim(factor))
        full = np.kron(full, np.asarray(piece, dtype=np.complex128))
    return OperatorMatrix(space, full)


def ladder_operators(space: HilbertSpace) -> Ladder:
    a = embed(annihilation(space.n_cavity), Subsystem.CAVITY, space)
    b = embed(annihilation(space.n_mech), Subsystem.MECH, space)
    adag, bdag = a.dag(), b.dag()
    return Ladder(a=a, adag=adag, b=b, bdag=bdag, n_a=adag @ a, n_b=bdag @ b)


def pauli_operators(space: HilbertSpace) -> Pauli:
    if not space.has_qubit:
        raise InvalidSpaceError("Pauli operators need a qubit factor")
    sp = QUBIT_SP
    sm = sp.conj().T
    return Pauli(
        sz=embed(QUBIT_SZ, Subsystem.QUBIT, space),
        sx=embed(sp + sm, Subsystem.QUBIT, space),
        sy=embed(-1j * (sp - sm), Subsystem.QUBIT, space),
        sp=embed(sp, Subsystem.QUBIT, space),
        sm=embed(sm, Subsystem.QUBIT, space),
    )


def number_function(space: HilbertSpace, fn, which=Subsystem.CAVITY) -> OperatorMatrix:
    """f(n) evaluated per eigenvalue of the number operator of one factor."""
    levels = np.arange(space.factor_dim(which), dtype=float)
    return embed(np.diag(fn(levels)), which, space)


def _matrix_exp(matrix: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(matrix)):
        raise NumericalOverflowError("matrix exponential input has non-finite entries")
    off_diagonal = matrix - np.diag(np.diag(matrix))
    if not np.any(off_diagonal):
        result = np.diag(np.exp(np.diag(matrix)))
    else:
        result = linalg.expm(matrix)
    if not np.all(np.isfinite(result)):
        norm = np.linalg.norm(matrix, 1)
        raise NumericalOverflowError(f"matrix exponential overflowed (1-norm {norm:.3e})")
    return result


def expm(op: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(op.space, _matrix_exp(op.entries))


def _check_laguerre_args(n: int, s: int):
    if n < 0 or s < 0:
        raise InvalidArgumentError(f"laguerre needs n >= 0 and s >= 0, got n={n}, s={s}")


def laguerre_table(n_max: int, s: int, x) -> np.ndarray:
    """L_0^(s)(x) .. L_n_max^(s)(x) stacked along the first axis."""
    _check_laguerre_args(n_max, s)
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape)
    previous = np.zeros_like(x)
    current = np.ones_like(x)
    table[0] = current
    for k in range(1, n_max + 1):
        previous, current = current, ((2 * k - 1 + s - x) * current - (k - 1 + s) * previous) / k
        table[k] = current
    return table


def laguerre(n: int, s: int, x):
    value = laguerre_table(n, s, x)[n]
    return float(value) if np.ndim(value) == 0 else value


def auto_guard(dimension: int, alpha: complex) -> int:
    """Extra levels so that the cropped exponential is exact on the original levels."""
    edge = (math.sqrt(dimension) + abs(alpha) + 4.0) ** 2
    return int(max(math.ceil(edge) - dimension, 0)) + 8


def _displacement_elements(dimension: int, alpha: complex) -> np.ndarray:
    x = abs(alpha) ** 2
    out = np.zeros((dimension, dimension), dtype=np.complex128)
    log_fact = gammaln(np.arange(dimension) + 1.0)
    for d in range(dimension):
        lower = np.arange(dimension - d)
        upper = lower + d
        poly = laguerre_table(dimension - 1 - d, d, x)
        scale = np.exp(0.5 * (log_fact[lower] - log_fact[upper]) - 0.5 * x)
        out[upper, lower] = scale * alpha ** d * poly
        if d:
            out[lower, upper] = scale * (-np.conj(alpha)) ** d * poly
    return out


def displacement_matrix(dimension: int, alpha: complex, method: str = "expm",
                        guard: Optional[int] = 0) -> np.ndarray:
    """Single-mode D(alpha) = exp(alpha b^dag - alpha^* b) on `dimension` levels.

    `expm` exponentiates the truncated generator on dimension + guard levels and
    crops; guard=None picks auto_guard. `laguerre` fills the exact Fock elements.
    """
    alpha = complex(alpha)
    if method == "laguerre":
        return _displacement_elements(dimension, alpha)
    if method != "expm":
        raise InvalidArgumentError(f"unknown displacement method '{method}', use {DISPLACEMENT_METHODS}")
    if guard is None:
        guard = auto_guard(dimension, alpha)
        logger.debug(f"displacement |alpha|={abs(alpha):.3g}: {guard} guard levels over {dimension}")
    size = dimension + guard
    b = annihilation(size)
    full = _matrix_exp(alpha * b.conj().T - np.conj(alpha) * b)
    return full[:dimension, :dimension]


def displacement(space: HilbertSpace, alpha: complex, mode=Subsystem.MECH,
                 method: str = "expm", guard: Optional[int] = 0) -> OperatorMatrix:
    mode = Subsystem(mode)
    if mode is Subsystem.QUBIT:
        raise InvalidArgumentError("displacement acts on a bosonic mode")
    return embed(displacement_matrix(space.factor_dim(mode), alpha, method, guard), mode, space)


def displacement_conditioned(space: HilbertSpace, xi_coeff: complex, offset: float = 0.0,
                             method: str = "expm", guard: Optional[int] = 0) -> OperatorMatrix:
    """D_b(xi_coeff * (n_a - offset)), block diagonal in photon number."""
    blocks = np.zeros((space.n_cavity * space.n_mech,) * 2, dtype=np.complex128)
    for k in range(space.n_cavity):
        block = displacement_matrix(space.n_mech, xi_coeff * (k - offset), method, guard)
        blocks += np.kron(projector(space.n_cavity, k), block)
    if space.has_qubit:
        blocks = np.kron(np.eye(2), blocks)
    return OperatorMatrix(space, blocks)


def susskind_glogower(space: HilbertSpace) -> SusskindGlogower:
    n = space.n_cavity
    shift = np.eye(n, k=1, dtype=np.complex128)
    V = embed(shift, Subsystem.CAVITY, space)
    return SusskindGlogower(V=V, Vdag=V.dag())


# states

def fock_vector(dimension: int, level: int) -> np.ndarray:
    if not 0 <= level < dimension:
        raise InvalidArgumentError(f"Fock level {level} outside 0..{dimension - 1}")
    v = np.zeros(dimension, dtype=np.complex128)
    v[level] = 1.0
    return v


def coherent_vector(dimension: int, alpha: complex) -> np.ndarray:
    v = displacement_matrix(dimension, alpha, "laguerre")[:, 0]
    return v / np.linalg.norm(v)


def thermal_weights(dimension: int, nbar: float, normalize: bool = True) -> np.ndarray:
    if nbar < 0:
        raise InvalidArgumentError(f"nbar must be non-negative, got {nbar}")
    k = np.arange(dimension, dtype=float)
    weights = nbar ** k / (1.0 + nbar) ** (k + 1)
    return weights / weights.sum() if normalize else weights


class StateFactory:
    """Standard states on a space; unnamed factors sit in |g> / |0>."""

    REFERENCE_QUBIT_LEVEL = 1

    def __init__(self, space: HilbertSpace):
        self.space = space

    def _reference(self, which: Subsystem) -> np.ndarray:
        level = self.REFERENCE_QUBIT_LEVEL if which is Subsystem.QUBIT else 0
        return fock_vector(self.space.factor_dim(which), level)

    def _ket(self, **factor_kets) -> np.ndarray:
        out = np.ones(1, dtype=np.complex128)
        for factor in self.space.factors:
            piece = factor_kets.get(factor.value)
            out = np.kron(out, self._reference(factor) if piece is None else piece)
        return out

    def fock(self, k_qubit: int = REFERENCE_QUBIT_LEVEL, k_cav: int = 0, k_mech: int = 0) -> QuantumState:
        kets = {
            Subsystem.CAVITY.value: fock_vector(self.space.n_cavity, k_cav),
            Subsystem.MECH.value: fock_vector(self.space.n_mech, k_mech),
        }
        if self.space.has_qubit:
            kets[Subsystem.QUBIT.value] = fock_vector(2, k_qubit)
        return QuantumState.from_ket(self.space, self._ket(**kets))

    def coherent(self, alpha: complex, mode=Subsystem.CAVITY) -> QuantumState:
        mode = Subsystem(mode)
        vec = coherent_vector(self.space.factor_dim(mode), alpha)
        return QuantumState.from_ket(self.space, self._ket(**{mode.value: vec}))

    def thermal(self, nbar: float, mode=Subsystem.CAVITY) -> QuantumState:
        mode = Subsystem(mode)
        weights = thermal_weights(self.space.factor_dim(mode), nbar)
        ops = {}
        for factor in self.space.factors:
            if factor is mode:
                ops[factor.value] = np.diag(weights)
            else:
                ref = self._reference(factor)
                ops[factor.value] = np.outer(ref, ref.conj())
        rho = embed_product(self.space, **ops).entries
        return QuantumState.from_density(self.space, rho)

    def product(self, densities: Dict[str, np.ndarray]) -> QuantumState:
        """Product state from per-factor density matrices."""
        ops = {}
        for factor in self.space.factors:
            rho = densities.get(factor.value)
            if rho is None:
                ref = self._reference(factor)
                rho = np.outer(ref, ref.conj())
            ops[factor.value] = rho
        return QuantumState.from_density(self.space, embed_product(self.space, **ops).entries)


def states(space: HilbertSpace) -> StateFactory:
    return StateFactory(space)
