"""Named verification suites: every operator identity checked on the buffered interior."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from optomech.config import settings
from optomech.core.exceptions import UnknownSuiteError
from optomech.models.space import HilbertSpace, OperatorMatrix
from optomech.physics import hamiltonians as ham
from optomech.physics.fock_core import (
    coherent_vector,
    displacement_conditioned,
    displacement_matrix,
    expm,
    ladder_operators,
    pauli_operators,
    states,
    thermal_weights,
)
from optomech.physics.open_dynamics import (
    DampedModelParams,
    closed_form_damped,
    damped_master_generator,
    displaced_master_generator,
    mechanical_generator,
    random_density,
    rk4_propagate,
    thermal_reduction_residual,
    trace_distance,
)
from optomech.physics.sideband_analysis import (
    compare_bands,
    h_sideband_fourier,
    h_sideband_printed_for,
    printed_a_term_defect,
    rwa_fidelity,
    sideband_coupling,
    time_averaged_drive,
)
from optomech.physics.transforms import (
    arbitration_report,
    buffered_deviation,
    cavity_frame,
    cm_frame,
    conjugate,
    hybrid_frame,
    pump_frame,
    right_unitary_T,
    rotating_frame_residual,
    ry_rotation,
    verify_identity,
)
from optomech.schemas.params import ModelParams, SidebandSpec
from optomech.schemas.report import DeviationReport, SuiteReport
from optomech.schemas.run_config import RunConfig

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12
SPECTRUM_TOL = 1e-8
DISPLACEMENT_TOL = 1e-9
PROPAGATOR_TOL = 1e-8
SQUARED_TOL = 1e-9
REARRANGEMENT_TOL = 1e-14
CLOSED_FORM_TOL = 1e-6
CPTP_TRACE_TOL = 1e-8
FIDELITY_FLOOR = 0.99
ORACLE_ALPHAS = (0.1, 0.5, 1.0, 2.0)
FACTORIZATION_SAMPLES = 3
PROPAGATION_GUARD_FACTOR = 2
ORDERING_PERIODS = 5


@dataclass
class SuiteContext:
    params: ModelParams = field(default_factory=ModelParams)
    space: HilbertSpace = field(default_factory=HilbertSpace)
    buffer_cav: int = field(default_factory=lambda: settings.buffer_cav)
    buffer_mech: int = field(default_factory=lambda: settings.buffer_mech)
    guard_mech: int = field(default_factory=lambda: settings.guard_mech)
    tol: float = field(default_factory=lambda: settings.identity_tolerance)
    seed: int = 7
    samples: int = 10
    sideband_orders: Sequence[int] = (0, 1, 2)
    closed_form_states: int = 10
    closed_form_support: int = 6
    fidelity_periods: float = 10.0
    dt: Optional[float] = None

    @classmethod
    def from_config(cls, config: RunConfig) -> "SuiteContext":
        return cls(
            params=config.params,
            space=HilbertSpace(config.n_cavity, config.n_mech, False),
            buffer_cav=config.buffer_cav,
            buffer_mech=config.buffer_mech,
            guard_mech=config.guard_mech,
            seed=config.seed,
            sideband_orders=tuple(config.sideband_orders),
            closed_form_states=config.closed_form_states,
            closed_form_support=config.closed_form_support,
            fidelity_periods=config.fidelity_periods,
            dt=config.step,
        )

    @property
    def period(self) -> float:
        return 2 * np.pi / self.params.omega_m

    @property
    def step(self) -> float:
        return self.dt if self.dt is not None else 1e-3 * self.period

    @property
    def hybrid_space(self) -> HilbertSpace:
        return self.space.with_qubit(True)

    def guarded(self, space: HilbertSpace, factor: int = 1) -> HilbertSpace:
        return space.with_guard(mech=factor * self.guard_mech)

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    def times(self, periods: float, count: Optional[int] = None, stream: int = 0) -> np.ndarray:
        return self.rng(stream).uniform(0.0, periods * self.period, size=count or self.samples)

    def compare(self, label: str, lhs: OperatorMatrix, rhs: OperatorMatrix,
                tol: Optional[float] = None, **fields) -> DeviationReport:
        return verify_identity(lhs, rhs, self.buffer_cav, self.buffer_mech, tol or self.tol, label, **fields)

    def worst(self, label: str, pairs, tol: Optional[float] = None, **fields) -> DeviationReport:
        """One report for an identity sampled at several points (max deviation)."""
        deviation = max(buffered_deviation(l, r, self.buffer_cav, self.buffer_mech) for l, r in pairs)
        return DeviationReport.measure(
            label, deviation, tol or self.tol, buffer=self.buffer_mech, buffer_cav=self.buffer_cav, **fields
        )


def _measure(label: str, deviation: float, tol: float, **fields) -> DeviationReport:
    return DeviationReport.measure(label, deviation, tol, **fields)


# pump-frame and rwa-average

def check_pump_frame(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    frame = pump_frame(p, space)
    pairs = [
        (rotating_frame_residual(frame, lambda t: ham.h_pumped(p, space, t), t), ham.h_pump_frame(p, space, t))
        for t in ctx.times(10)
    ]
    return [ctx.worst("pump-frame: U_R^dag (H_p - omega_p n_a) U_R = H_R", pairs,
                      notes=f"{ctx.samples} sampled times")]


def check_frame_unitarity(ctx: SuiteContext) -> List[DeviationReport]:
    frames = [pump_frame(ctx.params, ctx.space), cm_frame(ctx.params, ctx.space)]
    t1, t2 = ctx.times(10, count=2, stream=1)
    identity = OperatorMatrix.identity(ctx.space)
    unitarity, group = 0.0, 0.0
    for frame in frames:
        u1, u2 = frame.unitary(t1), frame.unitary(t2)
        unitarity = max(unitarity, (u1 @ u1.dag() - identity).max_abs())
        group = max(group, (u1 @ u2 - frame.unitary(t1 + t2)).max_abs())
    return [
        _measure("pump-frame: frame unitaries U U^dag = 1", unitarity, ctx.tol),
        _measure("pump-frame: frame composition U(t1) U(t2) = U(t1 + t2)", group, 1e-9),
    ]


def check_rwa_average(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    points = settings.quadrature_points
    period = 2 * np.pi / p.omega_p
    average = OperatorMatrix.zeros(space)
    for j in range(points):
        average = average + ham.h_pump_frame(p, space, j * period / points)
    average = average / points
    return [ctx.compare("rwa-average: pump-period average of H_R = H_c", average, ham.h_c(p, space))]


# polaron, cm-frame, kerr-spectrum

def check_displacement_oracle(ctx: SuiteContext) -> List[DeviationReport]:
    n = max(ctx.space.n_mech, 24)
    keep = n - ctx.buffer_mech
    agreement, unitarity = 0.0, 0.0
    for alpha in ORACLE_ALPHAS:
        by_expm = displacement_matrix(n, alpha, "expm", guard=None)
        by_laguerre = displacement_matrix(n, alpha, "laguerre")
        agreement = max(agreement, float(np.max(np.abs((by_expm - by_laguerre)[:keep, :keep]))))
        product = displacement_matrix(n, alpha, "expm") @ displacement_matrix(n, -alpha, "expm")
        unitarity = max(unitarity, float(np.max(np.abs((product - np.eye(n))[:keep, :keep]))))
    alphas = ", ".join(str(a) for a in ORACLE_ALPHAS)
    return [
        _measure("polaron: displacement expm = Laguerre elements", agreement, DISPLACEMENT_TOL,
                 buffer=ctx.buffer_mech, notes=f"alpha in {{{alphas}}}, n_mech={n}"),
        _measure("polaron: displacement D(alpha) D(-alpha) = 1", unitarity, DISPLACEMENT_TOL,
                 buffer=ctx.buffer_mech, notes=f"alpha in {{{alphas}}}, n_mech={n}"),
    ]


def check_polaron(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    guarded = ctx.guarded(space)
    D = displacement_conditioned(guarded, p.alpha, 0.0, guard=None)
    lhs = conjugate(D, ham.h_c(p, guarded)).restrict(space)
    rhs = ham.h_displaced(p, guarded).restrict(space)
    return [ctx.compare("polaron: D^dag(alpha n_a) H_c D(alpha n_a) = H_D", lhs, rhs,
                        notes=f"{ctx.guard_mech} guard levels")]


def check_cm_frame(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    frame = cm_frame(p, space)
    static = ham.h_displaced(p, space)
    pairs = [(rotating_frame_residual(frame, static, t), ham.h_cm(p, space, t)) for t in ctx.times(10, stream=2)]
    return [ctx.worst("cm-frame: U_cm^dag (H_D - delta_p n_a - omega_m n_b) U_cm = H_cm", pairs,
                      notes=f"{ctx.samples} sampled times")]


def check_kerr_spectrum(ctx: SuiteContext) -> List[DeviationReport]:
    p = ctx.params.replace(Omega=0.0)
    space = ctx.space
    guarded = ctx.guarded(space)
    keep = space.n_mech - ctx.buffer_mech
    H = ham.h_standard(p, guarded)
    levels = np.arange(keep)
    deviation = 0.0
    for n in range(space.n_cavity - ctx.buffer_cav):
        found = np.linalg.eigvalsh(H.block(n))[:keep]
        expected = p.omega_c * n + p.omega_m * levels - p.kerr * n ** 2
        deviation = max(deviation, float(np.max(np.abs(found - expected))))
    displaced = ham.h_displaced(p, space)
    off_diagonal = (displaced - OperatorMatrix.diagonal(space, np.diag(displaced.entries))).max_abs()
    return [
        _measure("kerr-spectrum: photon-block spectrum of H = omega_c n + omega_m m - g^2 n^2/omega_m",
                 deviation, SPECTRUM_TOL, buffer=ctx.buffer_mech, buffer_cav=ctx.buffer_cav),
        _measure("kerr-spectrum: H_D diagonal at Omega = 0", off_diagonal, EXACT_TOL),
    ]


# hybrid model

def check_rearrangement(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.hybrid_space
    ops = ladder_operators(space)
    pauli = pauli_operators(space)
    x = ops.b + ops.bdag
    shifted = ops.n_a - 0.5 * OperatorMatrix.identity(space)
    lhs = p.g * (x @ ham.excited_projector(space)) - p.g * (ops.n_a @ x)
    rhs = 0.5 * p.g * (x @ pauli.sz) - p.g * (shifted @ x)
    rearranged_T = (
        0.5 * p.delta * pauli.sz
        + p.omega_m * ops.n_b
        + p.lambda_ * (ham.number_function(space, np.sqrt) @ pauli.sx)
        + rhs
    )
    return [
        _measure("rearrangement: g X |e><e| - g n_a X = (g/2) X sz - g (n_a - 1/2) X",
                 (lhs - rhs).max_abs(), REARRANGEMENT_TOL),
        _measure("rearrangement: H_T in rearranged form", (ham.h_T(p, space) - rearranged_T).max_abs(),
                 REARRANGEMENT_TOL),
    ]


def check_hybrid_frame(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.hybrid_space
    frame = hybrid_frame(p, space)
    times = ctx.times(10, stream=3)
    implemented = [
        (rotating_frame_residual(frame, ham.h_hybrid(p, space), t), ham.h_hybrid_rotated(p, space))
        for t in times
    ]
    swap = ham.jaynes_cummings(p, space, printed=True) - ham.jaynes_cummings(p, space)
    printed_h = ham.h_hybrid(p, space) + swap
    printed_r = ham.h_hybrid_rotated(p, space) + swap
    printed = [(rotating_frame_residual(frame, printed_h, t), printed_r) for t in times]
    candidates = {
        "lambda (a sp + a^dag sm)": max(buffered_deviation(l, r, ctx.buffer_cav, ctx.buffer_mech)
                                        for l, r in implemented),
        "lambda (a^dag sp + a sm) as printed": max(buffered_deviation(l, r, ctx.buffer_cav, ctx.buffer_mech)
                                                   for l, r in printed),
    }
    return [
        ctx.worst("right-unitary: U_r^dag (H_h - omega_c (n_a + sz/2)) U_r = H_r", implemented,
                  notes=f"{ctx.samples} sampled times"),
        arbitration_report("right-unitary: qubit-field convention", candidates, ctx.tol,
                           buffer=ctx.buffer_mech, buffer_cav=ctx.buffer_cav, informational=True,
                           notes="sp = |e><g|"),
    ]


def check_right_unitary(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.hybrid_space
    pair = right_unitary_T(space)
    identity = OperatorMatrix.identity(space)
    H_T = ham.h_T(p, space)
    H_r = ham.h_hybrid_rotated(p, space)
    mapped = pair.forward(H_T)
    reports = [
        ctx.compare("right-unitary: T T^dag = 1", pair.T @ pair.Tdag, identity, EXACT_TOL),
        _measure("right-unitary: T^dag T = 1 - P",
                 (pair.Tdag @ pair.T - (identity - pair.defect_projector)).max_abs(), EXACT_TOL),
        ctx.compare("right-unitary: T H_T T^dag = H_r", mapped, H_r),
        _measure("right-unitary: T H_T P = 0", (pair.T @ H_T @ pair.defect_projector).max_abs(), EXACT_TOL),
        ctx.compare("right-unitary: T H_T^2 T^dag = H_r^2", pair.forward(H_T @ H_T), H_r @ H_r, SQUARED_TOL),
    ]
    pairs = [
        (expm(-1j * t * H_r), pair.forward(expm(-1j * t * H_T)))
        for t in ctx.times(5, stream=4)
    ]
    reports.append(ctx.worst("right-unitary: exp(-i H_r t) = T exp(-i H_T t) T^dag", pairs, PROPAGATOR_TOL,
                             notes=f"{ctx.samples} sampled times up to 5 mechanical periods"))
    return reports


def check_hybrid_chain(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.hybrid_space
    guarded = ctx.guarded(space)
    D = displacement_conditioned(guarded, p.alpha, 0.5, guard=None)
    lhs = conjugate(D, ham.h_T(p, guarded)).restrict(space)
    R = ry_rotation(np.pi / 4, space)
    rotated = R @ ham.h_d(p, space) @ R.dag()
    candidates = {
        form: buffered_deviation(rotated, ham.h_a(p, space, form), ctx.buffer_cav, ctx.buffer_mech)
        for form in ham.OMEGA_TILDE_FACTORS
    }
    return [
        ctx.compare("hybrid-chain: D^dag[alpha (n_a - 1/2)] H_T D[alpha (n_a - 1/2)] = H_d", lhs,
                    ham.h_d(p, space), notes=f"{ctx.guard_mech} guard levels"),
        arbitration_report("hybrid-chain: R_y(pi/4) H_d R_y^dag(pi/4) = H_K + H_am (Omega-tilde factor)",
                           candidates, ctx.tol, buffer=ctx.buffer_mech, buffer_cav=ctx.buffer_cav,
                           notes="derived: g^2/omega_m (n - 1/2), printed: g^2/(2 omega_m) (n - 1/2)"),
    ]


def check_rotation_signs(ctx: SuiteContext) -> List[DeviationReport]:
    space = ctx.hybrid_space
    pauli = pauli_operators(space)
    R = ry_rotation(np.pi / 4, space)
    to_x = (R @ pauli.sz @ R.dag() - pauli.sx).max_abs()
    to_z = (R @ pauli.sx @ R.dag() + pauli.sz).max_abs()
    return [
        _measure("hybrid-chain: R_y(pi/4) sz R_y^dag = +sx", to_x, EXACT_TOL),
        _measure("hybrid-chain: R_y(pi/4) sx R_y^dag = -sz", to_z, EXACT_TOL),
    ]


def check_kerr_block(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.hybrid_space
    H_K, H_am = ham.h_K(p, space), ham.h_am(p, space)
    H_a = H_K + H_am
    times = ctx.times(5, count=FACTORIZATION_SAMPLES, stream=5)
    factorized = max((expm(-1j * t * H_a) - expm(-1j * t * H_K) @ expm(-1j * t * H_am)).max_abs() for t in times)
    return [
        _measure("hybrid-chain: [H_K, H_am] = 0", H_K.commutator(H_am).max_abs(), EXACT_TOL),
        _measure("hybrid-chain: exp(-i H_a t) = exp(-i H_K t) exp(-i H_am t)", factorized, SQUARED_TOL),
    ]


def check_evolution_ordering(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.hybrid_space
    # propagation over several periods leaks into the guard levels
    guarded = ctx.guarded(space, factor=PROPAGATION_GUARD_FACTOR)
    pair = right_unitary_T(guarded)
    D = displacement_conditioned(guarded, p.alpha, 0.5, guard=None)
    R = ry_rotation(np.pi / 4, guarded)
    H_a = ham.h_a(p, guarded)
    H_r = ham.h_hybrid_rotated(p, guarded)
    outer = pair.T @ D
    inner = D.dag() @ pair.Tdag
    deviations = {"T D R^dag exp(-i H_a t) R D^dag T^dag": 0.0, "T D R exp(-i H_a t) R^dag D^dag T^dag as printed": 0.0}
    for t in ctx.times(ORDERING_PERIODS, count=FACTORIZATION_SAMPLES, stream=6):
        U_a = expm(-1j * t * H_a)
        exact = expm(-1j * t * H_r).restrict(space)
        chains = {
            "T D R^dag exp(-i H_a t) R D^dag T^dag": outer @ R.dag() @ U_a @ R @ inner,
            "T D R exp(-i H_a t) R^dag D^dag T^dag as printed": outer @ R @ U_a @ R.dag() @ inner,
        }
        for name, chain in chains.items():
            dev = buffered_deviation(chain.restrict(space), exact, ctx.buffer_cav, ctx.buffer_mech)
            deviations[name] = max(deviations[name], dev)
    return [arbitration_report("hybrid-chain: evolution operator ordering", deviations, PROPAGATOR_TOL,
                               buffer=ctx.buffer_mech, buffer_cav=ctx.buffer_cav,
                               notes=(f"{FACTORIZATION_SAMPLES} sampled times, H_a = R_y H_d R_y^dag, "
                                      f"{PROPAGATION_GUARD_FACTOR * ctx.guard_mech} guard levels"))]


# sidebands

def _spec(ctx: SuiteContext, s: int, sign: int, alpha: Optional[float] = None) -> SidebandSpec:
    return SidebandSpec(s=s, sign=sign, alpha=ctx.params.alpha if alpha is None else alpha)


def check_sideband_operators(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    reports = []
    for sign in (1, -1):
        spec = _spec(ctx, 0, sign)
        fourier = h_sideband_fourier(p, space, spec)
        printed = h_sideband_printed_for(p, space, spec)
        reports.append(_measure(f"sideband: s=0 sign={sign:+d} printed = Fourier",
                                (fourier - printed).max_abs(), DISPLACEMENT_TOL))
    for s in sorted(set(ctx.sideband_orders) - {0}):
        for sign in (1, -1):
            spec = _spec(ctx, s, sign)
            comparison = compare_bands(p, space, spec)
            fourier = h_sideband_fourier(p, space, spec)
            printed = h_sideband_printed_for(p, space, spec)
            mirrored = h_sideband_fourier(p, space, _spec(ctx, s, -sign))
            tag = f"s={s} sign={sign:+d}"
            reports += [
                _measure(f"sideband: {tag} band magnitudes printed = Fourier",
                         comparison.max_magnitude_deviation, DISPLACEMENT_TOL),
                _measure(f"sideband: {tag} orientation", (fourier - printed).max_abs(), DISPLACEMENT_TOL,
                         informational=True,
                         notes=(f"Fourier pairs a with mechanical band {comparison.fourier_band:+d}, "
                                f"printed pairs a with band {comparison.printed_band:+d}; "
                                f"orientation_match={comparison.orientation_match}")),
                _measure(f"sideband: {tag} printed = Fourier of opposite sign",
                         (printed - mirrored).max_abs(), DISPLACEMENT_TOL),
                _measure(f"sideband: {tag} literal a-term = conjugate of a^dag term",
                         printed_a_term_defect(p, space, spec), DISPLACEMENT_TOL, informational=True,
                         notes=f"literal a-term carries (-1)^s = {(-1) ** s:+d}"),
                _measure(f"sideband: {tag} Fourier operator Hermitian", fourier.hermiticity_defect(), EXACT_TOL),
            ]
    return reports


def check_sideband_time_average(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    reports = []
    for s in sorted(set(ctx.sideband_orders)):
        spec = _spec(ctx, s, 1)
        lowering = sideband_coupling(space, spec)
        constructed = 0.5 * p.Omega * (lowering + lowering.dag())
        average = time_averaged_drive(p, space, spec)
        reports.append(_measure(f"sideband: s={s} period average of the H_cm drive = Fourier operator",
                                (average - constructed).max_abs(), SPECTRUM_TOL))
    return reports


def check_rwa_fidelity(ctx: SuiteContext) -> List[DeviationReport]:
    p = ctx.params.replace(Omega=0.2 * ctx.params.omega_m)
    space = ctx.space
    psi0 = states(space).fock(k_cav=1, k_mech=0)
    reports = []
    t_max = ctx.fidelity_periods * ctx.period
    # off-resonant carrier light shift over the run
    stark_phase = (0.5 * p.Omega) ** 2 / p.omega_m * t_max
    for alpha in (0.05, 0.5):
        spec = SidebandSpec(s=1, sign=1, alpha=alpha)
        series = rwa_fidelity(p, space, spec, psi0, t_max, ctx.step, record_every=50)
        resolved = p.Omega / (2 * alpha * p.omega_m)
        reports.append(_measure(
            f"sideband: RWA fidelity alpha={alpha} s=1", max(0.0, 1.0 - series.min_fidelity), 1.0 - FIDELITY_FLOOR,
            informational=True,
            notes=(f"min F = {series.min_fidelity:.6f} over {ctx.fidelity_periods:g} periods, "
                   f"Omega = 0.2 omega_m, norm drift {series.norm_drift:.1e}; "
                   f"resolved-sideband regime needs Omega / (2 alpha omega_m) << 1, here {resolved:.3g}, "
                   f"carrier light-shift phase {stark_phase:.3g} rad"),
        ))
    return reports


# damped mirror

def _reduction_states(ctx: SuiteContext):
    rng = ctx.rng(7)
    space = ctx.space
    sigma = random_density(space.n_mech, rng, support=space.n_mech // 2)
    ground = random_density(space.n_mech, rng, support=1)
    fock_field = np.zeros((space.n_cavity, space.n_cavity), dtype=np.complex128)
    level = min(2, space.n_cavity - 1)
    fock_field[level, level] = 1.0
    return {
        "thermal (x) random": (np.diag(thermal_weights(space.n_cavity, ctx.params.nbar)), sigma),
        "thermal (x) |0><0|": (np.diag(thermal_weights(space.n_cavity, ctx.params.nbar)), ground),
        f"Fock |{level}> (x) random": (fock_field, sigma),
        "random diagonal (x) random": (random_density(space.n_cavity, rng, diagonal=True), sigma),
    }


def check_thermal_reduction(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    reports = [
        _measure(f"damped-reduction: residual for {name}",
                 thermal_reduction_residual(p, space, sigma, field_state=field_state), ctx.tol)
        for name, (field_state, sigma) in _reduction_states(ctx).items()
    ]
    rng = ctx.rng(8)
    amplitude = coherent_vector(space.n_cavity, 0.8)
    coherent_field = np.outer(amplitude, amplitude.conj())
    sigma = random_density(space.n_mech, rng, support=space.n_mech // 2)
    reports.append(_measure(
        "damped-reduction: residual for coherent field (photon-number coherences)",
        thermal_reduction_residual(p, space, sigma, field_state=coherent_field), ctx.tol,
        informational=True, notes="the reduction holds per photon-number-diagonal block",
    ))
    return reports


def check_generator_properties(ctx: SuiteContext) -> List[DeviationReport]:
    gen = displaced_master_generator(ctx.params, ctx.space)
    rng = ctx.rng(9)
    trace, hermiticity = 0.0, 0.0
    for _ in range(20):
        rho = random_density(ctx.space.dim, rng)
        out = gen.apply(rho)
        trace = max(trace, abs(np.trace(out)))
        hermiticity = max(hermiticity, float(np.max(np.abs(out - out.conj().T))))
    return [
        _measure("damped-reduction: displaced generator trace preserving", trace, ctx.tol,
                 notes="20 random states"),
        _measure("damped-reduction: displaced generator Hermiticity preserving", hermiticity, EXACT_TOL,
                 notes="20 random states"),
    ]


def check_dephasing_coefficient(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    guarded = ctx.guarded(space)
    beta = DampedModelParams.from_params(p).beta
    D = displacement_conditioned(guarded, beta, 0.0, guard=None).entries
    rng = ctx.rng(10)
    keep = guarded.interior_indices(space.n_cavity - ctx.buffer_cav, space.n_mech // 2)
    block = random_density(len(keep), rng)
    rho_D = np.zeros((guarded.dim, guarded.dim), dtype=np.complex128)
    rho_D[np.ix_(keep, keep)] = block
    original = damped_master_generator(p, guarded).apply(D @ rho_D @ D.conj().T)
    candidates = {}
    for form in ("derived", "printed"):
        displaced = D @ displaced_master_generator(p, guarded, form).apply(rho_D) @ D.conj().T
        lhs = OperatorMatrix(guarded, displaced).restrict(space)
        rhs = OperatorMatrix(guarded, original).restrict(space)
        candidates[f"{form} dephasing"] = buffered_deviation(lhs, rhs, ctx.buffer_cav, ctx.buffer_mech)
    return [arbitration_report("damped-reduction: displaced generator conjugation relation", candidates,
                               DISPLACEMENT_TOL, buffer=ctx.buffer_mech, buffer_cav=ctx.buffer_cav,
                               notes="derived: gamma |beta|^2 L_n, printed: gamma L_n")]


def check_damped_frame(ctx: SuiteContext) -> List[DeviationReport]:
    p, space = ctx.params, ctx.space
    frame = cavity_frame(space, p.omega_c)
    flipped = ham.h_damped_section(p.replace(g=-p.g), space)
    pairs = [(rotating_frame_residual(frame, ham.h_standard(p, space), t), flipped)
             for t in ctx.times(10, stream=11)]
    return [ctx.worst("damped-reduction: U_c^dag (H - omega_c n_a) U_c = H_m with g -> -g", pairs,
                      notes="H_m carries +g; the standard Hamiltonian carries -g")]


# closed form

def check_closed_form(ctx: SuiteContext) -> List[DeviationReport]:
    p = ctx.params
    n = ctx.space.n_mech
    gen = mechanical_generator(p.omega_m, p.gamma, n)
    rng = ctx.rng(12)
    t_max = 5.0 / p.gamma
    n_steps = int(np.ceil(t_max / ctx.step - 1e-9))
    record_every = max(1, n_steps // 20)
    errors = {"jump-first": 0.0, "decay-first": 0.0}
    drift, min_eig = 0.0, np.inf
    for _ in range(ctx.closed_form_states):
        rho0 = random_density(n, rng, support=ctx.closed_form_support)
        series = rk4_propagate(gen, rho0, t_max, ctx.step, record_every=record_every, eig_every=1,
                               keep_states=True)
        drift = max(drift, series.max_trace_drift())
        min_eig = min(min_eig, series.min_eigenvalue())
        for t, rho in zip(series.times, series.states):
            for ordering in errors:
                exact = closed_form_damped(rho0, t, p.omega_m, p.gamma, ordering)
                errors[ordering] = max(errors[ordering], trace_distance(exact, rho))
    ground = np.zeros((n, n), dtype=np.complex128)
    ground[0, 0] = 1.0
    late = closed_form_damped(random_density(n, rng, support=ctx.closed_form_support), 20.0 / p.gamma,
                              p.omega_m, p.gamma)
    return [
        arbitration_report("closed-form: superoperator ordering vs RK4", errors, CLOSED_FORM_TOL,
                           notes=f"{ctx.closed_form_states} random states up to t = 5/gamma, trace distance"),
        _measure("closed-form: RK4 trace drift", drift, CPTP_TRACE_TOL),
        _measure("closed-form: RK4 positivity (-min eigenvalue)", max(0.0, -min_eig), CLOSED_FORM_TOL),
        _measure("closed-form: relaxation to |0><0| at t = 20/gamma", trace_distance(late, ground),
                 CLOSED_FORM_TOL),
    ]


Check = Callable[[SuiteContext], List[DeviationReport]]

SUITES: Dict[str, Sequence[Check]] = {
    "pump-frame": (check_pump_frame, check_frame_unitarity),
    "rwa-average": (check_rwa_average,),
    "polaron": (check_displacement_oracle, check_polaron),
    "cm-frame": (check_cm_frame,),
    "kerr-spectrum": (check_kerr_spectrum,),
    "rearrangement": (check_rearrangement,),
    "right-unitary": (check_hybrid_frame, check_right_unitary),
    "hybrid-chain": (check_hybrid_chain, check_rotation_signs, check_kerr_block, check_evolution_ordering),
    "sideband": (check_sideband_operators, check_sideband_time_average, check_rwa_fidelity),
    "damped-reduction": (check_thermal_reduction, check_generator_properties, check_dephasing_coefficient,
                         check_damped_frame),
    "closed-form": (check_closed_form,),
}


def verify_suite(name: str, ctx: Optional[SuiteContext] = None, workers: int = 1) -> SuiteReport:
    """Run every check of a suite; reports are ordered by label."""
    if name not in SUITES:
        raise UnknownSuiteError(name, list(SUITES))
    ctx = ctx or SuiteContext()
    checks = SUITES[name]
    logger.info(f"Running suite '{name}' ({len(checks)} checks) on {ctx.space}")
    if workers > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda check: check(ctx), checks))
    else:
        results = [check(ctx) for check in checks]
    reports = sorted((r for batch in results for r in batch), key=lambda r: r.label)
    suite = SuiteReport(suite=name, checks=reports)
    failed = [r.label for r in reports if not r.passed and not r.informational]
    if failed:
        logger.error(f"Suite '{name}' failed: {', '.join(failed)}")
    else:
        logger.info(f"Suite '{name}' passed ({len(reports)} reports)")
    return suite
