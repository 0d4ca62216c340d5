import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import eval_genlaguerre

from optomech.core.exceptions import InvalidArgumentError, InvalidSpaceError, UnknownModelError
from optomech.models.space import HilbertSpace
from optomech.physics import hamiltonians as ham
from optomech.physics.fock_core import ladder_operators, pauli_operators
from optomech.physics.hamiltonians import MODELS, build_model, model_entry, model_space


class TestCatalog:
    @pytest.mark.parametrize("model_id", sorted(MODELS))
    def test_every_model_is_hermitian(self, model_id, params, small_space):
        op = build_model(model_id, params, small_space, t=0.37)
        assert op.is_hermitian(1e-12)

    def test_qubit_models_get_a_qubit(self, params, small_space):
        op = build_model("hybrid", params, small_space)
        assert op.space.has_qubit
        assert op.space.dims == (2, small_space.n_cavity, small_space.n_mech)

    def test_cavity_models_drop_the_qubit(self, hybrid_space):
        assert not model_space("standard", hybrid_space).has_qubit

    def test_unknown_model_names_valid_ids(self):
        with pytest.raises(UnknownModelError) as exc:
            model_entry("polaron")
        assert "standard" in exc.value.detail
        assert "hybrid-am" in exc.value.detail

    def test_time_dependence_flags(self):
        assert MODELS["pumped"].time_dependent
        assert MODELS["cm"].time_dependent
        assert not MODELS["displaced"].time_dependent
        assert MODELS["hybrid-K"].needs_qubit


class TestStandardModels:
    def test_uncoupled_standard_model_is_diagonal(self, params, small_space):
        op = ham.h_standard(params.replace(g=0.0), small_space)
        cav, mech = small_space.level_grids()
        assert_allclose(op.entries, np.diag(params.omega_c * cav + params.omega_m * mech))

    def test_pumped_at_zero_time_adds_full_drive(self, params, small_space):
        ops = ladder_operators(small_space)
        diff = ham.h_pumped(params, small_space, 0.0) - ham.h_standard(params, small_space)
        assert_allclose(diff.entries, (params.Omega * (ops.a + ops.adag)).entries)

    def test_h_c_is_pump_frame_without_counter_rotating_part(self, params, small_space):
        t = np.pi / (2 * params.omega_p)
        average = 0.5 * (ham.h_pump_frame(params, small_space, 0.0) + ham.h_pump_frame(params, small_space, t))
        assert (average - ham.h_c(params, small_space)).max_abs() < 1e-12

    def test_kerr_term_values(self, params, small_space):
        cav, _ = small_space.level_grids()
        kerr = ham.kerr_term(params, small_space)
        assert_allclose(np.diag(kerr.entries).real, -params.kerr * cav ** 2)

    def test_displaced_without_pump_is_diagonal(self, params, small_space):
        op = ham.h_displaced(params.replace(Omega=0.0), small_space)
        cav, mech = small_space.level_grids()
        expected = params.delta_p * cav - params.kerr * cav ** 2 + params.omega_m * mech
        assert_allclose(op.entries, np.diag(expected), atol=1e-14)

    def test_cm_frame_has_no_free_energy(self, params, small_space):
        op = ham.h_cm(params.replace(Omega=0.0), small_space, 1.3)
        assert_allclose(op.entries, ham.kerr_term(params, small_space).entries, atol=1e-14)

    def test_damped_section_sign(self, params, small_space):
        diff = ham.h_damped_section(params, small_space) - ham.h_damped_section(params.replace(g=0.0), small_space)
        ops = ladder_operators(small_space)
        assert_allclose(diff.entries, (params.g * (ops.n_a @ (ops.b + ops.bdag))).entries)

    def test_cavity_builders_reject_qubit_spaces(self, params, hybrid_space):
        with pytest.raises(InvalidSpaceError):
            ham.h_standard(params, hybrid_space)


class TestSidebandTerms:
    @pytest.mark.parametrize("s", [0, 1, 2])
    def test_sideband_function(self, s):
        alpha = 0.2
        values = ham.sideband_function(10, s, alpha)
        n = np.arange(10)
        ratio = np.array([np.prod(1.0 / np.arange(k + 1, k + s + 1)) for k in n])
        assert_allclose(values, ratio * eval_genlaguerre(n, s, alpha ** 2), rtol=1e-12)

    @pytest.mark.parametrize("s,sign", [(1, 1), (1, -1), (2, 1), (2, -1)])
    def test_literal_lowering_term_carries_sign(self, params, small_space, s, sign):
        p = params.replace(s=s, sideband_sign=sign)
        literal = ham.printed_sideband_lowering_term(p, small_space)
        conjugate = ham.printed_sideband_raising_term(p, small_space).dag()
        assert (literal - (-1) ** s * conjugate).max_abs() < 1e-14

    def test_zero_order_is_diagonal_in_mechanics(self, params, small_space):
        p = params.replace(s=0)
        op = ham.h_sideband_printed(p, small_space) - ham.kerr_term(p, small_space)
        mech = op.entries[0:small_space.n_mech, small_space.n_mech:2 * small_space.n_mech]
        assert_allclose(mech, np.diag(np.diag(mech)))
        assert mech[0, 0].real == pytest.approx(0.5 * p.Omega * np.exp(-0.5 * p.alpha ** 2))


class TestHybridModels:
    def test_jaynes_cummings_conserves_excitations(self, params, hybrid_space):
        ops = ladder_operators(hybrid_space)
        pauli = pauli_operators(hybrid_space)
        excitations = ops.n_a + ham.excited_projector(hybrid_space)
        assert ham.jaynes_cummings(params, hybrid_space).commutator(excitations).max_abs() < 1e-14
        swapped = ham.jaynes_cummings(params, hybrid_space, printed=True)
        assert swapped.commutator(ops.n_a - ham.excited_projector(hybrid_space)).max_abs() < 1e-14
        assert pauli.sz.is_hermitian()

    def test_kerr_block_values(self, params, hybrid_space):
        op = build_model("hybrid-K", params, hybrid_space)
        cav, _ = hybrid_space.level_grids()
        assert_allclose(op.entries, np.diag(-params.kerr * (cav - 0.5) ** 2), atol=1e-15)

    def test_omega_tilde_forms(self, params, hybrid_space):
        derived = ham.Omega_tilde(params, hybrid_space, "derived")
        printed = ham.Omega_tilde(params, hybrid_space, "printed")
        cav, _ = hybrid_space.level_grids()
        assert_allclose(np.diag((derived - printed).entries).real, 0.5 * params.kerr * (cav - 0.5))

    def test_unknown_omega_tilde_form(self, params, hybrid_space):
        with pytest.raises(InvalidArgumentError):
            ham.Omega_tilde(params, hybrid_space, "halved")

    def test_h_a_splits_into_kerr_and_remainder(self, params, hybrid_space):
        total = ham.h_a(params, hybrid_space)
        assert (total - ham.h_K(params, hybrid_space) - ham.h_am(params, hybrid_space)).max_abs() < 1e-14

    def test_hybrid_builders_need_qubit(self, params):
        with pytest.raises(InvalidSpaceError):
            ham.h_T(params, HilbertSpace(3, 6))
