"""Frame changes, similarity transformations and buffered identity checks."""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Union

import numpy as np

from optomech.core.exceptions import InvalidArgumentError, InvalidBufferError
from optomech.models.space import HERMITIAN_TOL, HilbertSpace, OperatorMatrix, Subsystem
from optomech.physics.fock_core import (
    embed,
    expm,
    ladder_operators,
    pauli_operators,
    projector,
    susskind_glogower,
)
from optomech.physics.hamiltonians import excited_projector
from optomech.schemas.params import ModelParams
from optomech.schemas.report import DeviationReport

logger = logging.getLogger(__name__)

HamiltonianLike = Union[OperatorMatrix, Callable[[float], OperatorMatrix]]


@dataclass(frozen=True)
class FrameGenerator:
    """Hermitian G defining the frame U(t) = exp(-iGt)."""

    generator: OperatorMatrix
    description: str = ""

    def __post_init__(self):
        defect = self.generator.hermiticity_defect()
        if defect >= HERMITIAN_TOL:
            raise InvalidArgumentError(f"frame generator is not Hermitian (defect {defect:.3e})")

    @property
    def space(self) -> HilbertSpace:
        return self.generator.space

    def unitary(self, t: float) -> OperatorMatrix:
        return expm(-1j * t * self.generator)


def pump_frame(params: ModelParams, space: HilbertSpace) -> FrameGenerator:
    ops = ladder_operators(space)
    return FrameGenerator(params.omega_p * ops.n_a, "U_R: rotation at the pump frequency")


def cm_frame(params: ModelParams, space: HilbertSpace) -> FrameGenerator:
    ops = ladder_operators(space)
    return FrameGenerator(
        params.delta_p * ops.n_a + params.omega_m * ops.n_b,
        "U_cm: cavity at delta_p and mirror at omega_m",
    )


def cavity_frame(space: HilbertSpace, omega_f: float) -> FrameGenerator:
    ops = ladder_operators(space)
    return FrameGenerator(omega_f * ops.n_a, f"U_c: cavity rotation at {omega_f}")


def hybrid_frame(params: ModelParams, space: HilbertSpace) -> FrameGenerator:
    ops = ladder_operators(space)
    pauli = pauli_operators(space)
    return FrameGenerator(
        params.omega_c * (ops.n_a + 0.5 * pauli.sz),
        "U_r: cavity and qubit rotation at omega_c",
    )


def conjugate(U: OperatorMatrix, H: OperatorMatrix) -> OperatorMatrix:
    """U^dag H U."""
    return U.dag() @ H @ U


def rotating_frame_residual(frame: FrameGenerator, h_of_t: HamiltonianLike, t: float) -> OperatorMatrix:
    """U^dag(t) (H(t) - G) U(t), the generator of the dynamics in the frame."""
    H = h_of_t(t) if callable(h_of_t) else h_of_t
    return conjugate(frame.unitary(t), H - frame.generator)


def ry_rotation(theta: float, space: HilbertSpace) -> OperatorMatrix:
    """R_y(theta) = exp(-i theta sigma_y).

    With |e> = (1, 0): R_y(pi/4) sz R_y(pi/4)^dag = +sx and R_y(pi/4) sx R_y(pi/4)^dag = -sz.
    """
    pauli = pauli_operators(space)
    return expm(-1j * theta * pauli.sy)


@dataclass(frozen=True)
class RightUnitaryPair:
    T: OperatorMatrix
    Tdag: OperatorMatrix
    defect_projector: OperatorMatrix

    def forward(self, H: OperatorMatrix) -> OperatorMatrix:
        """T H T^dag."""
        return self.T @ H @ self.Tdag


def right_unitary_T(space: HilbertSpace) -> RightUnitaryPair:
    """T = |e><e| (x) V + |g><g| (x) 1, so that T T^dag = 1 and T^dag T = 1 - P."""
    sg = susskind_glogower(space)
    excited = excited_projector(space)
    ground = OperatorMatrix.identity(space) - excited
    T = excited @ sg.V + ground
    vacuum = embed(projector(space.n_cavity, 0), Subsystem.CAVITY, space)
    return RightUnitaryPair(T=T, Tdag=T.dag(), defect_projector=excited @ vacuum)


def _check_buffers(space: HilbertSpace, buffer_cav: int, buffer_mech: int):
    if not 0 <= buffer_cav < space.n_cavity:
        raise InvalidBufferError(buffer_cav, space.n_cavity, Subsystem.CAVITY.value)
    if not 0 <= buffer_mech < space.n_mech:
        raise InvalidBufferError(buffer_mech, space.n_mech, Subsystem.MECH.value)


def buffered_deviation(lhs: OperatorMatrix, rhs: OperatorMatrix, buffer_cav: int, buffer_mech: int) -> float:
    """max |P_buf (lhs - rhs) P_buf| over the interior levels."""
    _check_buffers(lhs.space, buffer_cav, buffer_mech)
    diff = (lhs - rhs).entries
    idx = lhs.space.interior_indices(lhs.space.n_cavity - buffer_cav, lhs.space.n_mech - buffer_mech)
    return float(np.max(np.abs(diff[np.ix_(idx, idx)])))


def verify_identity(lhs: OperatorMatrix, rhs: OperatorMatrix, buffer_cav: int, buffer_mech: int,
                    tol: float, label: str = "identity", **report_fields) -> DeviationReport:
    deviation = buffered_deviation(lhs, rhs, buffer_cav, buffer_mech)
    report = DeviationReport.measure(
        label, deviation, tol, buffer=buffer_mech, buffer_cav=buffer_cav, **report_fields
    )
    level = logging.DEBUG if report.passed or report.informational else logging.WARNING
    logger.log(level, f"{label}: deviation {deviation:.3e} (tol {tol:.1e}) passed={report.passed}")
    return report


def arbitration_report(label: str, candidates: Dict[str, float], tol: float, **report_fields) -> DeviationReport:
    """Report the best-matching candidate and name the rejected ones in the notes."""
    ranked = sorted(candidates.items(), key=lambda item: item[1])
    best, best_dev = ranked[0]
    rejected = ", ".join(f"{name} ({dev:.3e})" for name, dev in ranked[1:])
    prefix = report_fields.pop("notes", "")
    notes = f"matches: {best}"
    if rejected:
        notes += f"; rejected: {rejected}"
    if prefix:
        notes = f"{prefix}; {notes}"
    logger.info(f"{label}: {notes}")
    return DeviationReport.measure(label, best_dev, tol, notes=notes, candidates=dict(candidates), **report_fields)
