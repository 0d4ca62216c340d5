import logging
from typing import Callable, Dict, NamedTuple

import numpy as np
from scipy.special import gammaln

from optomech.core.exceptions import InvalidArgumentError, InvalidSpaceError, UnknownModelError
from optomech.models.space import HilbertSpace, OperatorMatrix, Subsystem
from optomech.physics.fock_core import (
    QUBIT_EXCITED,
    annihilation,
    displacement,
    embed,
    laguerre_table,
    ladder_operators,
    number_function,
    pauli_operators,
)
from optomech.schemas.params import ModelParams

logger = logging.getLogger(__name__)

OMEGA_TILDE_FACTORS = {"derived": 1.0, "printed": 0.5}


def _require_qubit(space: HilbertSpace, needed: bool, builder: str):
    if needed and not space.has_qubit:
        raise InvalidSpaceError(f"{builder} needs a qubit factor")
    if not needed and space.has_qubit:
        raise InvalidSpaceError(f"{builder} is defined without a qubit factor")


def _position(space: HilbertSpace) -> OperatorMatrix:
    ops = ladder_operators(space)
    return ops.b + ops.bdag


def _radiation_pressure(space: HilbertSpace) -> OperatorMatrix:
    ops = ladder_operators(space)
    return ops.n_a @ (ops.b + ops.bdag)


def h_standard(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    _require_qubit(space, False, "h_standard")
    ops = ladder_operators(space)
    return params.omega_c * ops.n_a + params.omega_m * ops.n_b - params.g * _radiation_pressure(space)


def h_pumped(params: ModelParams, space: HilbertSpace, t: float) -> OperatorMatrix:
    ops = ladder_operators(space)
    drive = params.Omega * np.cos(params.omega_p * t)
    return h_standard(params, space) + drive * (ops.adag + ops.a)


def _rotated_core(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    ops = ladder_operators(space)
    return params.delta_p * ops.n_a + params.omega_m * ops.n_b - params.g * _radiation_pressure(space)


def h_pump_frame(params: ModelParams, space: HilbertSpace, t: float) -> OperatorMatrix:
    _require_qubit(space, False, "h_pump_frame")
    ops = ladder_operators(space)
    phase = np.exp(2j * params.omega_p * t)
    drive = 0.5 * params.Omega * ((1 + phase) * ops.adag + (1 + np.conj(phase)) * ops.a)
    return _rotated_core(params, space) + drive


def h_c(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    _require_qubit(space, False, "h_c")
    ops = ladder_operators(space)
    return _rotated_core(params, space) + 0.5 * params.Omega * (ops.adag + ops.a)


def kerr_term(params: ModelParams, space: HilbertSpace, offset: float = 0.0) -> OperatorMatrix:
    return number_function(space, lambda n: -params.kerr * (n - offset) ** 2)


def _displaced_drive(params: ModelParams, space: HilbertSpace, alpha: complex,
                     phase: complex = 1.0, method: str = "expm") -> OperatorMatrix:
    ops = ladder_operators(space)
    d = displacement(space, alpha, Subsystem.MECH, method)
    lowering = phase * (ops.a @ d)
    return 0.5 * params.Omega * (lowering + lowering.dag())


def h_displaced(params: ModelParams, space: HilbertSpace, method: str = "expm") -> OperatorMatrix:
    _require_qubit(space, False, "h_displaced")
    ops = ladder_operators(space)
    return (
        params.delta_p * ops.n_a
        + kerr_term(params, space)
        + params.omega_m * ops.n_b
        + _displaced_drive(params, space, params.alpha, method=method)
    )


def h_cm(params: ModelParams, space: HilbertSpace, t: float, method: str = "expm") -> OperatorMatrix:
    _require_qubit(space, False, "h_cm")
    alpha_t = params.alpha * np.exp(1j * params.omega_m * t)
    phase = np.exp(-1j * params.delta_p * t)
    return kerr_term(params, space) + _displaced_drive(params, space, alpha_t, phase, method)


def sideband_function(n_mech: int, s: int, alpha: float) -> np.ndarray:
    """Diagonal of n!/(n+s)! L_n^(s)(alpha^2) over the mechanical levels."""
    n = np.arange(n_mech, dtype=float)
    ratio = np.exp(gammaln(n + 1) - gammaln(n + s + 1))
    return ratio * laguerre_table(n_mech - 1, s, alpha ** 2)


def _printed_sideband_terms(params: ModelParams, space: HilbertSpace):
    s, alpha = params.s, params.alpha
    b = annihilation(space.n_mech)
    f = np.diag(sideband_function(space.n_mech, s, alpha))
    lowered = np.linalg.matrix_power(alpha * b, s)
    raised = np.linalg.matrix_power(-alpha * b.conj().T, s)
    if params.sideband_sign == 1:
        with_a, with_adag = f @ lowered, raised @ f
    else:
        with_a, with_adag = raised @ f, f @ lowered
    ops = ladder_operators(space)
    weight = 0.5 * params.Omega * np.exp(-0.5 * alpha ** 2)
    return (
        weight * (ops.a @ embed(with_a, Subsystem.MECH, space)),
        weight * (ops.adag @ embed(with_adag, Subsystem.MECH, space)),
    )


def printed_sideband_raising_term(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    """The a^dag term of H_+ (sign +1) or H_- (sign -1), taken literally."""
    return _printed_sideband_terms(params, space)[1]


def printed_sideband_lowering_term(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    """The a term, taken literally; equals (-1)^s times the conjugate of the a^dag term."""
    return _printed_sideband_terms(params, space)[0]


def h_sideband_printed(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    # the literal a-term carries an extra (-1)^s; completing with the conjugate keeps H Hermitian
    _require_qubit(space, False, "h_sideband_printed")
    raising = printed_sideband_raising_term(params, space)
    return kerr_term(params, space) + raising + raising.dag()


def h_damped_section(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    _require_qubit(space, False, "h_damped_section")
    ops = ladder_operators(space)
    return params.omega_m * ops.n_b + params.g * _radiation_pressure(space)


def jaynes_cummings(params: ModelParams, space: HilbertSpace, printed: bool = False) -> OperatorMatrix:
    """lambda (a sp + a^dag sm); printed=True gives lambda (a^dag sp + a sm)."""
    ops = ladder_operators(space)
    pauli = pauli_operators(space)
    coupling = (ops.adag if printed else ops.a) @ pauli.sp
    return params.lambda_ * (coupling + coupling.dag())


def h_hybrid(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    _require_qubit(space, True, "h_hybrid")
    ops = ladder_operators(space)
    pauli = pauli_operators(space)
    return (
        params.omega_c * ops.n_a
        + params.omega_m * ops.n_b
        - params.g * _radiation_pressure(space)
        + 0.5 * params.omega_0 * pauli.sz
        + jaynes_cummings(params, space)
    )


def h_hybrid_rotated(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    _require_qubit(space, True, "h_hybrid_rotated")
    ops = ladder_operators(space)
    pauli = pauli_operators(space)
    return (
        0.5 * params.delta * pauli.sz
        + params.omega_m * ops.n_b
        + jaynes_cummings(params, space)
        - params.g * _radiation_pressure(space)
    )


def _sqrt_n(space: HilbertSpace) -> OperatorMatrix:
    return number_function(space, np.sqrt)


def excited_projector(space: HilbertSpace) -> OperatorMatrix:
    return embed(QUBIT_EXCITED, Subsystem.QUBIT, space)


def h_T(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    _require_qubit(space, True, "h_T")
    ops = ladder_operators(space)
    pauli = pauli_operators(space)
    x = _position(space)
    return (
        0.5 * params.delta * pauli.sz
        + params.omega_m * ops.n_b
        + params.lambda_ * (_sqrt_n(space) @ pauli.sx)
        - params.g * _radiation_pressure(space)
        + params.g * (x @ excited_projector(space))
    )


def h_d(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    _require_qubit(space, True, "h_d")
    ops = ladder_operators(space)
    pauli = pauli_operators(space)
    shifted = number_function(space, lambda n: n - 0.5)
    field = (
        0.5 * params.delta * OperatorMatrix.identity(space)
        + 0.5 * params.g * _position(space)
        + params.kerr * shifted
    )
    return (
        field @ pauli.sz
        + params.omega_m * ops.n_b
        + params.lambda_ * (_sqrt_n(space) @ pauli.sx)
        + h_K(params, space)
    )


def h_K(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    return kerr_term(params, space, offset=0.5)


def omega_tilde(params: ModelParams, space: HilbertSpace) -> OperatorMatrix:
    return -params.lambda_ * _sqrt_n(space)


def Omega_tilde(params: ModelParams, space: HilbertSpace, form: str = "derived") -> OperatorMatrix:
    if form not in OMEGA_TILDE_FACTORS:
        raise InvalidArgumentError(f"unknown Omega-tilde form '{form}', use {list(OMEGA_TILDE_FACTORS)}")
    factor = OMEGA_TILDE_FACTORS[form] * params.kerr
    return number_function(space, lambda n: 0.5 * params.delta + factor * (n - 0.5))


def h_am(params: ModelParams, space: HilbertSpace, form: str = "derived") -> OperatorMatrix:
    _require_qubit(space, True, "h_am")
    ops = ladder_operators(space)
    pauli = pauli_operators(space)
    return (
        params.omega_m * ops.n_b
        + omega_tilde(params, space) @ pauli.sz
        + Omega_tilde(params, space, form) @ pauli.sx
        + 0.5 * params.g * (_position(space) @ pauli.sx)
    )


def h_a(params: ModelParams, space: HilbertSpace, form: str = "derived") -> OperatorMatrix:
    return h_K(params, space) + h_am(params, space, form)


class ModelEntry(NamedTuple):
    builder: Callable
    needs_qubit: bool = False
    time_dependent: bool = False
    uses_displacement: bool = False


MODELS: Dict[str, ModelEntry] = {
    "standard": ModelEntry(h_standard),
    "pumped": ModelEntry(h_pumped, time_dependent=True),
    "pump-frame": ModelEntry(h_pump_frame, time_dependent=True),
    "rwa-pump": ModelEntry(h_c),
    "displaced": ModelEntry(h_displaced, uses_displacement=True),
    "cm": ModelEntry(h_cm, time_dependent=True, uses_displacement=True),
    "sideband": ModelEntry(h_sideband_printed),
    "damped": ModelEntry(h_damped_section),
    "hybrid": ModelEntry(h_hybrid, needs_qubit=True),
    "hybrid-rotated": ModelEntry(h_hybrid_rotated, needs_qubit=True),
    "hybrid-T": ModelEntry(h_T, needs_qubit=True),
    "hybrid-displaced": ModelEntry(h_d, needs_qubit=True),
    "hybrid-K": ModelEntry(h_K, needs_qubit=True),
    "hybrid-am": ModelEntry(h_am, needs_qubit=True),
}


def model_entry(model_id: str) -> ModelEntry:
    if model_id not in MODELS:
        raise UnknownModelError(model_id, list(MODELS))
    return MODELS[model_id]


def model_space(model_id: str, space: HilbertSpace) -> HilbertSpace:
    entry = model_entry(model_id)
    if entry.needs_qubit != space.has_qubit:
        logger.info(f"Model '{model_id}' uses has_qubit={entry.needs_qubit}; adjusting {space}")
        return space.with_qubit(entry.needs_qubit)
    return space


def model_hamiltonian(model_id: str, params: ModelParams, space: HilbertSpace):
    """Callable t -> OperatorMatrix for a catalog model on its own space."""
    entry = model_entry(model_id)
    space = model_space(model_id, space)

    def at(t: float, method: str = "expm") -> OperatorMatrix:
        kwargs = {"method": method} if entry.uses_displacement else {}
        if entry.time_dependent:
            return entry.builder(params, space, t, **kwargs)
        return entry.builder(params, space, **kwargs)

    return space, at


def build_model(model_id: str, params: ModelParams, space: HilbertSpace,
                t: float = 0.0, method: str = "expm") -> OperatorMatrix:
    _, at = model_hamiltonian(model_id, params, space)
    op = at(t, method)
    logger.debug(f"Built model '{model_id}' on {op.space}")
    return op
