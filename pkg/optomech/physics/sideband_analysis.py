"""Resonant sideband couplings extracted from the double rotating frame."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from optomech.config import settings
from optomech.core.exceptions import (
    IntegrationError,
    InvalidArgumentError,
    QuadratureConvergenceError,
)
from optomech.models.space import HilbertSpace, OperatorMatrix, QuantumState, Subsystem
from optomech.physics.fock_core import displacement_matrix, embed, expm, ladder_operators
from optomech.physics.hamiltonians import (
    h_cm,
    h_displaced,
    h_sideband_printed,
    kerr_term,
    printed_sideband_lowering_term,
    printed_sideband_raising_term,
)
from optomech.schemas.params import ModelParams, SidebandSpec

logger = logging.getLogger(__name__)

CONVERGENCE_TOL = 1e-12
MAX_QUADRATURE_POINTS = 4096
NORM_DRIFT_LIMIT = 1e-6


def _fourier_quadrature(n_mech: int, alpha: float, k: int, points: int) -> np.ndarray:
    thetas = 2 * np.pi * np.arange(points) / points
    acc = np.zeros((n_mech, n_mech), dtype=np.complex128)
    for theta in thetas:
        acc += displacement_matrix(n_mech, alpha * np.exp(1j * theta), "laguerre") * np.exp(-1j * k * theta)
    return acc / points


def fourier_component_matrix(n_mech: int, alpha: float, k: int, points: Optional[int] = None) -> np.ndarray:
    """(1/2pi) int D(alpha e^{i theta}) e^{-ik theta} d theta on the mechanical factor.

    Trapezoidal rule with `points` nodes, doubled until the result moves by less
    than CONVERGENCE_TOL.
    """
    if abs(k) > n_mech:
        raise InvalidArgumentError(f"|k|={abs(k)} exceeds n_mech={n_mech}")
    points = points or settings.quadrature_points
    current = _fourier_quadrature(n_mech, alpha, k, points)
    while points < MAX_QUADRATURE_POINTS:
        refined = _fourier_quadrature(n_mech, alpha, k, 2 * points)
        change = float(np.max(np.abs(refined - current)))
        points *= 2
        current = refined
        if change < CONVERGENCE_TOL:
            return current
        logger.debug(f"Fourier component k={k}: change {change:.3e}, doubling to {points} points")
    raise QuadratureConvergenceError(
        f"Fourier component k={k} at alpha={alpha} did not converge with {points} points"
    )


def displacement_fourier_component(space: HilbertSpace, alpha: float, k: int,
                                   points: Optional[int] = None) -> OperatorMatrix:
    return embed(fourier_component_matrix(space.n_mech, alpha, k, points), Subsystem.MECH, space)


def resonant_params(params: ModelParams, spec: SidebandSpec) -> ModelParams:
    """Parameters with delta_p = sign * s * omega_m and g = alpha * omega_m."""
    return params.replace(
        omega_p=params.omega_c - spec.harmonic * params.omega_m,
        g=spec.alpha * params.omega_m,
        s=spec.s,
        sideband_sign=spec.sign,
    )


def sideband_coupling(space: HilbertSpace, spec: SidebandSpec, points: Optional[int] = None) -> OperatorMatrix:
    """a C with C the Fourier component whose phase cancels exp(-i delta_p t)."""
    ops = ladder_operators(space)
    return ops.a @ displacement_fourier_component(space, spec.alpha, spec.harmonic, points)


def h_sideband_fourier(params: ModelParams, space: HilbertSpace, spec: SidebandSpec,
                       points: Optional[int] = None) -> OperatorMatrix:
    resonant = resonant_params(params, spec)
    lowering = sideband_coupling(space, spec, points)
    return kerr_term(resonant, space) + 0.5 * params.Omega * (lowering + lowering.dag())


def h_sideband_printed_for(params: ModelParams, space: HilbertSpace, spec: SidebandSpec) -> OperatorMatrix:
    return h_sideband_printed(resonant_params(params, spec), space)


def time_averaged_drive(params: ModelParams, space: HilbertSpace, spec: SidebandSpec,
                        points: Optional[int] = None) -> OperatorMatrix:
    """Average of the drive part of H_cm over one mechanical period at resonance."""
    resonant = resonant_params(params, spec)
    points = points or settings.quadrature_points
    period = 2 * np.pi / params.omega_m
    kerr = kerr_term(resonant, space)
    acc = OperatorMatrix.zeros(space)
    for j in range(points):
        acc = acc + (h_cm(resonant, space, j * period / points, method="laguerre") - kerr)
    return acc / points


def _band(matrix: np.ndarray, offset: int) -> np.ndarray:
    """Elements <m + offset| M |m> of a single-mode matrix."""
    return np.diagonal(matrix, offset=-offset)


def _mechanical_part(op: OperatorMatrix, cavity_from: int, cavity_to: int) -> np.ndarray:
    """Mechanical matrix <cavity_to| op |cavity_from> (no qubit factor)."""
    n = op.space.n_mech
    rows = slice(cavity_to * n, (cavity_to + 1) * n)
    cols = slice(cavity_from * n, (cavity_from + 1) * n)
    return op.entries[rows, cols]


@dataclass
class BandComparison:
    s: int
    sign: int
    alpha: float
    fourier_band: int
    printed_band: int
    max_magnitude_deviation: float
    orientation_match: bool
    fourier_magnitudes: List[float] = field(default_factory=list)
    printed_magnitudes: List[float] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "s": self.s,
            "sign": self.sign,
            "fourier_band": self.fourier_band,
            "printed_band": self.printed_band,
            "max_magnitude_deviation": self.max_magnitude_deviation,
            "orientation_match": self.orientation_match,
        }


def compare_bands(params: ModelParams, space: HilbertSpace, spec: SidebandSpec,
                  points: Optional[int] = None) -> BandComparison:
    """Compare the a-paired mechanical bands of the Fourier and printed sideband operators.

    Both operators are Hermitian, so the a-paired part is read from the
    cavity 1 -> 0 block.
    """
    resonant = resonant_params(params, spec)
    fourier = h_sideband_fourier(params, space, spec, points)
    printed = h_sideband_printed_for(params, space, spec)
    kerr = kerr_term(resonant, space)
    f_mech = _mechanical_part(fourier - kerr, 1, 0)
    p_mech = _mechanical_part(printed - kerr, 1, 0)

    fourier_band = spec.harmonic
    printed_band = _dominant_band(p_mech, spec.s, fallback=-spec.harmonic)
    f_mag = np.abs(_band(f_mech, fourier_band))
    p_mag = np.abs(_band(p_mech, printed_band))
    deviation = float(np.max(np.abs(f_mag - p_mag))) if f_mag.size else 0.0
    comparison = BandComparison(
        s=spec.s,
        sign=spec.sign,
        alpha=spec.alpha,
        fourier_band=fourier_band,
        printed_band=printed_band,
        max_magnitude_deviation=deviation,
        orientation_match=fourier_band == printed_band,
        fourier_magnitudes=f_mag.tolist(),
        printed_magnitudes=p_mag.tolist(),
    )
    logger.info(
        f"sideband s={spec.s} sign={spec.sign:+d} alpha={spec.alpha}: band deviation {deviation:.3e}, "
        f"Fourier band {fourier_band:+d} vs printed band {printed_band:+d}"
    )
    return comparison


def _dominant_band(mech: np.ndarray, s: int, fallback: int) -> int:
    if s == 0:
        return 0
    raising = float(np.max(np.abs(_band(mech, s))))
    lowering = float(np.max(np.abs(_band(mech, -s))))
    if raising == lowering == 0.0:
        return fallback
    return s if raising > lowering else -s


def printed_a_term_defect(params: ModelParams, space: HilbertSpace, spec: SidebandSpec) -> float:
    """Distance between the literal a-term and the conjugate of the a^dag term."""
    resonant = resonant_params(params, spec)
    literal = printed_sideband_lowering_term(resonant, space)
    completion = printed_sideband_raising_term(resonant, space).dag()
    return (literal - completion).max_abs()


@dataclass
class FidelitySeries:
    times: List[float] = field(default_factory=list)
    fidelity: List[float] = field(default_factory=list)
    norm_drift: float = 0.0

    @property
    def header(self) -> List[str]:
        return ["t", "fidelity"]

    def rows(self) -> List[List[float]]:
        return [[t, f] for t, f in zip(self.times, self.fidelity)]

    @property
    def min_fidelity(self) -> float:
        return min(self.fidelity) if self.fidelity else float("nan")


class _FrameDrive:
    """H_cm(t) psi without rebuilding the displacement at every time."""

    def __init__(self, params: ModelParams, space: HilbertSpace):
        ops = ladder_operators(space)
        self.energies = np.real(np.diag((params.delta_p * ops.n_a + params.omega_m * ops.n_b).entries))
        self.kerr = np.real(np.diag(kerr_term(params, space).entries))
        static = h_displaced(params, space, method="laguerre").entries
        self.coupling = static - np.diag(self.energies + self.kerr)

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        u = np.exp(-1j * self.energies * t)
        return self.kerr * psi + np.conj(u) * (self.coupling @ (u * psi))

    def matrix(self, t: float) -> np.ndarray:
        u = np.exp(-1j * self.energies * t)
        return np.diag(self.kerr).astype(np.complex128) + np.conj(u)[:, None] * self.coupling * u[None, :]


def cm_drive(params: ModelParams, space: HilbertSpace) -> Callable[[float], np.ndarray]:
    """t -> H_cm(t) from one Laguerre-built displacement."""
    return _FrameDrive(params, space).matrix


def rwa_fidelity(params: ModelParams, space: HilbertSpace, spec: SidebandSpec, psi0, t_max: float,
                 dt: float, record_every: int = 10) -> FidelitySeries:
    """F(t) = |<psi_cm(t)|psi_rwa(t)>|^2 between H_cm(t) and the resonant sideband Hamiltonian."""
    if dt <= 0 or t_max < dt:
        raise InvalidArgumentError(f"need dt > 0 and t_max >= dt, got dt={dt}, t_max={t_max}")
    psi = psi0.data if isinstance(psi0, QuantumState) else np.asarray(psi0, dtype=np.complex128)
    if psi.shape != (space.dim,):
        raise InvalidArgumentError(f"initial ket has shape {psi.shape}, expected ({space.dim},)")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise InvalidArgumentError("initial ket must be normalized")

    resonant = resonant_params(params, spec)
    frame = _FrameDrive(resonant, space)
    n_steps = int(math.ceil(t_max / dt - 1e-9))
    h = t_max / n_steps
    step_rwa = expm(-1j * h * h_sideband_fourier(params, space, spec)).entries

    full = psi.copy()
    rwa = psi.copy()
    series = FidelitySeries(times=[0.0], fidelity=[1.0])
    logger.info(f"RWA fidelity s={spec.s} sign={spec.sign:+d} alpha={spec.alpha}: {n_steps} steps of {h:.4g}")

    def rhs(vec, t):
        return -1j * frame.apply(vec, t)

    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        k1 = rhs(full, t)
        k2 = rhs(full + 0.5 * h * k1, t + 0.5 * h)
        k3 = rhs(full + 0.5 * h * k2, t + 0.5 * h)
        k4 = rhs(full + h * k3, t + h)
        full = full + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rwa = step_rwa @ rwa
        drift = abs(np.linalg.norm(full) - 1.0)
        series.norm_drift = max(series.norm_drift, drift)
        if drift > NORM_DRIFT_LIMIT:
            raise IntegrationError(f"norm drifted by {drift:.3e} at t={step * h:.6g}; reduce dt (currently {h:.3e})")
        if step % record_every == 0 or step == n_steps:
            series.times.append(step * h)
            series.fidelity.append(float(abs(np.vdot(full, rwa)) ** 2))
    logger.info(f"RWA fidelity min {series.min_fidelity:.6f}, norm drift {series.norm_drift:.2e}")
    return series


def coupling_grid(params: ModelParams, space: HilbertSpace, alphas, orders,
                  points: Optional[int] = None) -> List[Dict]:
    """Rows (alpha, s, sign, band, coupling_magnitude) of (Omega/2)|C| along the resonant band."""
    rows = []
    for alpha in alphas:
        for s in orders:
            for sign in (1, -1):
                spec = SidebandSpec(s=s, sign=sign, alpha=alpha)
                component = fourier_component_matrix(space.n_mech, alpha, spec.harmonic, points)
                for m, value in enumerate(_band(component, spec.harmonic)):
                    rows.append({
                        "alpha": float(alpha),
                        "s": s,
                        "sign": sign,
                        "band": m,
                        "coupling_magnitude": 0.5 * params.Omega * float(abs(value)),
                    })
    return rows
