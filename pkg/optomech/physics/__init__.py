from optomech.physics.fock_core import (
    displacement,
    displacement_conditioned,
    embed,
    expm,
    ladder_operators,
    laguerre,
    pauli_operators,
    states,
    susskind_glogower,
)
from optomech.physics.hamiltonians import MODELS, build_model
from optomech.physics.transforms import (
    FrameGenerator,
    RightUnitaryPair,
    conjugate,
    right_unitary_T,
    rotating_frame_residual,
    ry_rotation,
    verify_identity,
)
from optomech.physics.open_dynamics import (
    DampedModelParams,
    LindbladGenerator,
    closed_form_damped,
    displaced_master_generator,
    lindblad_apply,
    rk4_propagate,
    thermal_reduction_residual,
)
from optomech.physics.sideband_analysis import (
    displacement_fourier_component,
    h_sideband_fourier,
    rwa_fidelity,
)
from optomech.physics.suites import SUITES, SuiteContext, verify_suite

__all__ = [
    "displacement",
    "displacement_conditioned",
    "embed",
    "expm",
    "ladder_operators",
    "laguerre",
    "pauli_operators",
    "states",
    "susskind_glogower",
    "MODELS",
    "build_model",
    "FrameGenerator",
    "RightUnitaryPair",
    "conjugate",
    "right_unitary_T",
    "rotating_frame_residual",
    "ry_rotation",
    "verify_identity",
    "DampedModelParams",
    "LindbladGenerator",
    "closed_form_damped",
    "displaced_master_generator",
    "lindblad_apply",
    "rk4_propagate",
    "thermal_reduction_residual",
    "displacement_fourier_component",
    "h_sideband_fourier",
    "rwa_fidelity",
    "SUITES",
    "SuiteContext",
    "verify_suite",
]
