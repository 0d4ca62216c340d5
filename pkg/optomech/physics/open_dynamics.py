"""Lindblad generators, the displaced mirror-damping model and density-matrix propagation."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, NamedTuple, Optional, Tuple, Union

import numpy as np

from optomech.core.exceptions import DimensionMismatchError, IntegrationError, InvalidArgumentError
from optomech.models.space import HilbertSpace, OperatorMatrix, QuantumState
from optomech.physics.fock_core import annihilation, ladder_operators, number, thermal_weights
from optomech.physics.hamiltonians import h_damped_section
from optomech.schemas.params import ModelParams

logger = logging.getLogger(__name__)

TRACE_DRIFT_LIMIT = 1e-6
DEPHASING_FORMS = ("derived", "printed")
CLOSED_FORM_ORDERINGS = ("jump-first", "decay-first")

Matrix = np.ndarray
DensityLike = Union[QuantumState, Matrix]


@dataclass(frozen=True)
class DampedModelParams:
    beta: complex
    mu: complex
    epsilon: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "DampedModelParams":
        if params.omega_m <= 0:
            raise InvalidArgumentError("omega_m must be positive to set the displacement parameter")
        beta = -params.g / (params.omega_m - 1j * params.gamma)
        mu = params.g + params.omega_m * beta
        epsilon = 2 * params.g * beta.real + params.omega_m * abs(beta) ** 2
        return cls(beta=complex(beta), mu=complex(mu), epsilon=float(epsilon))


class CrossTerm(NamedTuple):
    """coefficient * N[rho] (tag "N") or coefficient * N^dag[rho] (tag "Ndag")."""

    tag: Literal["N", "Ndag"]
    coefficient: complex
    number_op: Matrix
    lowering: Matrix

    def apply(self, rho: Matrix) -> Matrix:
        n, b = self.number_op, self.lowering
        if self.tag == "N":
            nb_dag = b.conj().T @ n
            out = 2 * n @ rho @ b.conj().T - nb_dag @ rho - rho @ nb_dag
        else:
            nb = n @ b
            out = 2 * b @ rho @ n - nb @ rho - rho @ nb
        return self.coefficient * out


def _as_matrix(op) -> Matrix:
    if isinstance(op, OperatorMatrix):
        return op.entries
    return np.asarray(op, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    """drho/dt = -i[H(t), rho] + sum rate * L_J[rho] + extra terms.

    `drive(t)` adds a time-dependent part to the static Hamiltonian. `space` is
    None for generators that act on the mechanical factor alone.
    """

    hamiltonian: Matrix
    dissipators: Tuple[Tuple[float, Matrix], ...] = ()
    extra_terms: Tuple[CrossTerm, ...] = ()
    space: Optional[HilbertSpace] = None
    drive: Optional[Callable[[float], Matrix]] = None
    label: str = ""
    _decay: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        H = _as_matrix(self.hamiltonian)
        object.__setattr__(self, "hamiltonian", H)
        dissipators = []
        for rate, jump in self.dissipators:
            if rate < 0:
                raise InvalidArgumentError(f"dissipator rate must be non-negative, got {rate}")
            jump = _as_matrix(jump)
            if jump.shape != H.shape:
                raise DimensionMismatchError(H.shape, jump.shape, "jump operator")
            dissipators.append((float(rate), jump))
        object.__setattr__(self, "dissipators", tuple(dissipators))
        object.__setattr__(self, "extra_terms", tuple(self.extra_terms))
        for rate, jump in dissipators:
            jump_dag = jump.conj().T
            self._decay.append((rate, jump, jump_dag, jump_dag @ jump))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def hamiltonian_at(self, t: float) -> Matrix:
        if self.drive is None:
            return self.hamiltonian
        return self.hamiltonian + _as_matrix(self.drive(t))

    def apply(self, rho: Matrix, t: float = 0.0) -> Matrix:
        H = self.hamiltonian_at(t)
        out = -1j * (H @ rho - rho @ H)
        for rate, jump, jump_dag, jdj in self._decay:
            out += rate * (2 * jump @ rho @ jump_dag - jdj @ rho - rho @ jdj)
        for term in self.extra_terms:
            out += term.apply(rho)
        return out


def _density_matrix(rho: DensityLike) -> Matrix:
    if isinstance(rho, QuantumState):
        return rho.density()
    return np.asarray(rho, dtype=np.complex128)


def lindblad_apply(gen: LindbladGenerator, rho: DensityLike, t: float = 0.0) -> Matrix:
    rho = _density_matrix(rho)
    if rho.shape != (gen.dim, gen.dim):
        raise DimensionMismatchError((gen.dim, gen.dim), rho.shape, "density matrix")
    return gen.apply(rho, t)


def _require_no_qubit(space: HilbertSpace):
    if space.has_qubit:
        raise InvalidArgumentError("the damped mirror model has no qubit factor")


def damped_master_generator(params: ModelParams, space: HilbertSpace) -> LindbladGenerator:
    """-i[H_m, rho] + gamma L_b[rho] in the cavity frame."""
    _require_no_qubit(space)
    ops = ladder_operators(space)
    return LindbladGenerator(
        hamiltonian=h_damped_section(params, space).entries,
        dissipators=((params.gamma, ops.b.entries),),
        space=space,
        label="damped",
    )


def displaced_master_generator(params: ModelParams, space: HilbertSpace,
                               dephasing: str = "derived") -> LindbladGenerator:
    """Generator for rho_D = D^dag(beta n_a) rho D(beta n_a).

    The photon-number dephasing rate is gamma |beta|^2 ("derived") or gamma
    ("printed"); both agree on photon-number-diagonal field states.
    """
    if dephasing not in DEPHASING_FORMS:
        raise InvalidArgumentError(f"unknown dephasing form '{dephasing}', use {DEPHASING_FORMS}")
    _require_no_qubit(space)
    dp = DampedModelParams.from_params(params)
    ops = ladder_operators(space)
    n_a, b = ops.n_a.entries, ops.b.entries
    coupling = n_a @ (dp.mu * ops.bdag.entries + np.conj(dp.mu) * b)
    hamiltonian = dp.epsilon * n_a @ n_a + params.omega_m * ops.n_b.entries + coupling
    dephasing_rate = params.gamma * abs(dp.beta) ** 2 if dephasing == "derived" else params.gamma
    logger.debug(
        f"displaced generator: beta={dp.beta:.6g} mu={dp.mu:.6g} eps={dp.epsilon:.6g} "
        f"dephasing={dephasing_rate:.6g}"
    )
    return LindbladGenerator(
        hamiltonian=hamiltonian,
        dissipators=((params.gamma, b), (dephasing_rate, n_a)),
        extra_terms=(
            CrossTerm("N", params.gamma * dp.beta, n_a, b),
            CrossTerm("Ndag", params.gamma * np.conj(dp.beta), n_a, b),
        ),
        space=space,
        label=f"displaced-{dephasing}",
    )


def free_damped_generator(params: ModelParams, space: HilbertSpace) -> LindbladGenerator:
    """-i[omega_m n_b, rho] + gamma L_b[rho] on the full space."""
    ops = ladder_operators(space)
    return LindbladGenerator(
        hamiltonian=(params.omega_m * ops.n_b).entries,
        dissipators=((params.gamma, ops.b.entries),),
        space=space,
        label="free-damped",
    )


def mechanical_generator(omega_m: float, gamma: float, n_mech: int) -> LindbladGenerator:
    """Free damped oscillator on the mechanical factor alone."""
    return LindbladGenerator(
        hamiltonian=omega_m * number(n_mech),
        dissipators=((gamma, annihilation(n_mech)),),
        label="mechanical",
    )


def hamiltonian_generator(h_of_t: Callable[[float], OperatorMatrix], space: HilbertSpace,
                          time_dependent: bool, label: str = "") -> LindbladGenerator:
    """Closed dynamics -i[H(t), rho] of a catalog Hamiltonian."""
    if time_dependent:
        return LindbladGenerator(
            hamiltonian=np.zeros((space.dim, space.dim), dtype=np.complex128),
            drive=lambda t: h_of_t(t).entries,
            space=space,
            label=label,
        )
    return LindbladGenerator(hamiltonian=h_of_t(0.0).entries, space=space, label=label)


def thermal_field_state(space: HilbertSpace, nbar: float, sigma_mech: Matrix) -> Matrix:
    return np.kron(np.diag(thermal_weights(space.n_cavity, nbar)), sigma_mech)


def thermal_reduction_residual(params: ModelParams, space: HilbertSpace, sigma_mech: Matrix,
                               field_state: Optional[Matrix] = None,
                               dephasing: str = "derived") -> float:
    """max |L_D[rho] - L_free[rho]| for rho = field (x) sigma_mech (thermal field by default)."""
    sigma_mech = _density_matrix(sigma_mech)
    if sigma_mech.shape != (space.n_mech, space.n_mech):
        raise DimensionMismatchError((space.n_mech, space.n_mech), sigma_mech.shape, "mechanical state")
    if field_state is None:
        rho = thermal_field_state(space, params.nbar, sigma_mech)
    else:
        rho = np.kron(_density_matrix(field_state), sigma_mech)
    displaced = displaced_master_generator(params, space, dephasing)
    free = free_damped_generator(params, space)
    residual = displaced.apply(rho) - free.apply(rho)
    return float(np.max(np.abs(residual)))


def trace_distance(rho: DensityLike, sigma: DensityLike) -> float:
    diff = _density_matrix(rho) - _density_matrix(sigma)
    eigs = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return 0.5 * float(np.sum(np.abs(eigs)))


@dataclass
class TimeSeries:
    times: List[float] = field(default_factory=list)
    traces: List[float] = field(default_factory=list)
    min_eigs: List[float] = field(default_factory=list)
    expectations: Dict[str, List[complex]] = field(default_factory=dict)
    states: List[Matrix] = field(default_factory=list, repr=False)
    final_state: Optional[Matrix] = field(default=None, repr=False)

    @property
    def header(self) -> List[str]:
        cols = ["t", "trace", "min_eig"]
        for name in self.expectations:
            cols += [f"{name}_re", f"{name}_im"]
        return cols

    def rows(self) -> List[List[float]]:
        out = []
        for i, t in enumerate(self.times):
            row = [t, self.traces[i], self.min_eigs[i]]
            for values in self.expectations.values():
                row += [values[i].real, values[i].imag]
            out.append(row)
        return out

    def max_trace_drift(self) -> float:
        return float(np.max(np.abs(np.asarray(self.traces) - 1.0))) if self.traces else 0.0

    def min_eigenvalue(self) -> float:
        sampled = [v for v in self.min_eigs if not math.isnan(v)]
        return min(sampled) if sampled else float("nan")


def _observable_map(observables) -> Dict[str, Matrix]:
    if observables is None:
        return {}
    if isinstance(observables, dict):
        return {name: _as_matrix(op) for name, op in observables.items()}
    return {f"O{i}": _as_matrix(op) for i, op in enumerate(observables)}


def rk4_propagate(gen: LindbladGenerator, rho0: DensityLike, t_max: float, dt: float,
                  observables=None, record_every: int = 1, eig_every: int = 10,
                  keep_states: bool = False) -> TimeSeries:
    """Fixed-step RK4 for drho/dt = gen(rho, t), re-Hermitized after every step.

    The step is shrunk so an integer number of steps lands on t_max. Records are
    taken every `record_every` steps; the minimum eigenvalue every `eig_every`-th
    record (NaN otherwise).
    """
    if dt <= 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    if t_max < dt:
        raise InvalidArgumentError(f"t_max={t_max} must be at least dt={dt}")
    if record_every < 1 or eig_every < 1:
        raise InvalidArgumentError("record_every and eig_every must be >= 1")

    rho = _density_matrix(rho0).copy()
    if rho.shape != (gen.dim, gen.dim):
        raise DimensionMismatchError((gen.dim, gen.dim), rho.shape, "initial density matrix")
    obs = _observable_map(observables)
    n_steps = int(math.ceil(t_max / dt - 1e-9))
    h = t_max / n_steps
    series = TimeSeries(expectations={name: [] for name in obs})
    logger.info(f"RK4 '{gen.label}': {n_steps} steps of {h:.4g} up to t={t_max:.4g} (dim {gen.dim})")

    def record(t: float):
        index = len(series.times)
        series.times.append(t)
        series.traces.append(float(np.trace(rho).real))
        if index % eig_every == 0:
            series.min_eigs.append(float(np.linalg.eigvalsh(rho)[0]))
        else:
            series.min_eigs.append(float("nan"))
        for name, op in obs.items():
            series.expectations[name].append(complex(np.trace(op @ rho)))
        if keep_states:
            series.states.append(rho.copy())

    record(0.0)
    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        k1 = gen.apply(rho, t)
        k2 = gen.apply(rho + 0.5 * h * k1, t + 0.5 * h)
        k3 = gen.apply(rho + 0.5 * h * k2, t + 0.5 * h)
        k4 = gen.apply(rho + h * k3, t + h)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - 1.0)
        if drift > TRACE_DRIFT_LIMIT:
            raise IntegrationError(
                f"trace drifted by {drift:.3e} at t={step * h:.6g}; reduce dt (currently {h:.3e})"
            )
        if step % record_every == 0 or step == n_steps:
            record(step * h)
    series.final_state = rho
    return series


def _rotate(rho: Matrix, omega_m: float, t: float) -> Matrix:
    levels = np.arange(rho.shape[0])
    phase = np.exp(-1j * omega_m * t * levels)
    return phase[:, None] * rho * phase.conj()[None, :]


def _decay(rho: Matrix, gamma: float, t: float) -> Matrix:
    levels = np.arange(rho.shape[0])
    return np.exp(-gamma * t * (levels[:, None] + levels[None, :])) * rho


def _jump_exponential(rho: Matrix, gamma: float, t: float) -> Matrix:
    """exp(f J) rho with J rho = 2 gamma b rho b^dag; the series ends after dim terms."""
    if gamma == 0:
        return rho
    f = (1.0 - math.exp(-2.0 * gamma * t)) / (2.0 * gamma)
    b = annihilation(rho.shape[0])
    total = rho.copy()
    term = rho
    for k in range(1, rho.shape[0]):
        term = (f / k) * (2.0 * gamma) * (b @ term @ b.conj().T)
        total = total + term
    return total


def closed_form_damped(rho0: DensityLike, t: float, omega_m: float, gamma: float,
                       ordering: str = "jump-first") -> Matrix:
    """Free damped oscillator solution exp(Lt) exp(f(t) J) applied after the free rotation.

    "jump-first" applies exp(f J) before exp(Lt) (the solution consistent with
    [L, J] = 2 gamma J); "decay-first" swaps the two.
    """
    if gamma < 0:
        raise InvalidArgumentError(f"gamma must be non-negative, got {gamma}")
    if ordering not in CLOSED_FORM_ORDERINGS:
        raise InvalidArgumentError(f"unknown ordering '{ordering}', use {CLOSED_FORM_ORDERINGS}")
    rho = _rotate(_density_matrix(rho0), omega_m, t)
    if ordering == "jump-first":
        return _decay(_jump_exponential(rho, gamma, t), gamma, t)
    return _jump_exponential(_decay(rho, gamma, t), gamma, t)


def random_density(dim: int, rng: np.random.Generator, support: Optional[int] = None,
                   diagonal: bool = False) -> Matrix:
    """Random full-rank density matrix on the lowest `support` levels."""
    support = dim if support is None else min(support, dim)
    if diagonal:
        weights = rng.random(support)
        block = np.diag(weights / weights.sum()).astype(np.complex128)
    else:
        g = rng.normal(size=(support, support)) + 1j * rng.normal(size=(support, support))
        block = g @ g.conj().T
        block /= np.trace(block).real
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[:support, :support] = block
    return rho


def partial_trace_cavity(rho: Matrix, space: HilbertSpace) -> Matrix:
    """Mechanical reduced state of a cavity (x) mech density matrix."""
    if space.has_qubit:
        raise InvalidArgumentError("partial_trace_cavity expects a space without qubit")
    shaped = rho.reshape(space.n_cavity, space.n_mech, space.n_cavity, space.n_mech)
    return np.einsum("imin->mn", shaped)
