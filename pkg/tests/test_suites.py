import pytest

from optomech.core.exceptions import UnknownSuiteError
from optomech.physics.suites import (
    CLOSED_FORM_TOL,
    DISPLACEMENT_TOL,
    PROPAGATOR_TOL,
    SUITES,
    SuiteContext,
    verify_suite,
)
from optomech.schemas.report import DeviationReport, SuiteReport


EXACT_SUITES = ["pump-frame", "cm-frame", "rearrangement", "polaron", "kerr-spectrum", "right-unitary"]


class TestRegistry:
    def test_catalog(self):
        assert set(SUITES) == {
            "pump-frame", "rwa-average", "polaron", "cm-frame", "kerr-spectrum", "rearrangement",
            "right-unitary", "hybrid-chain", "sideband", "damped-reduction", "closed-form",
        }

    def test_unknown_suite(self, small_context):
        with pytest.raises(UnknownSuiteError) as exc:
            verify_suite("rabi", small_context)
        assert "closed-form" in exc.value.detail
        assert exc.value.exit_code == 1


class TestSuiteReports:
    @pytest.mark.parametrize("name", EXACT_SUITES)
    def test_exact_identities_pass(self, name, small_context):
        report = verify_suite(name, small_context)
        failing = [c.label for c in report.checks if not c.passed and not c.informational]
        assert failing == []
        assert report.passed

    def test_reports_are_sorted_by_label(self, small_context):
        report = verify_suite("right-unitary", small_context)
        labels = [c.label for c in report.checks]
        assert labels == sorted(labels)
        assert all(label.startswith("right-unitary:") for label in labels)

    def test_buffers_are_recorded(self, small_context):
        report = verify_suite("pump-frame", small_context)
        sampled = [c for c in report.checks if "H_R" in c.label][0]
        assert sampled.buffer == small_context.buffer_mech
        assert sampled.buffer_cav == small_context.buffer_cav

    def test_workers_do_not_change_the_report(self, small_context):
        serial = verify_suite("polaron", small_context)
        threaded = verify_suite("polaron", small_context, workers=2)
        assert serial.to_json_dict() == threaded.to_json_dict()

    def test_convention_arbitration_is_informational(self, small_context):
        report = verify_suite("right-unitary", small_context)
        convention = [c for c in report.checks if "convention" in c.label][0]
        assert convention.informational
        assert "matches:" in convention.notes

    def test_damped_reduction(self, small_context):
        report = verify_suite("damped-reduction", small_context)
        coherent = [c for c in report.checks if "coherent field" in c.label][0]
        assert coherent.informational
        assert not coherent.passed
        thermal = [c for c in report.checks if "thermal (x)" in c.label]
        assert len(thermal) == 2 and all(c.passed for c in thermal)
        dephasing = [c for c in report.checks if "conjugation relation" in c.label][0]
        assert dephasing.notes.startswith("derived: gamma |beta|^2")
        assert "matches: derived dephasing" in dephasing.notes


@pytest.mark.slow
class TestLongSuites:
    def test_polaron_at_default_truncation(self):
        assert verify_suite("polaron", SuiteContext()).passed

    def test_closed_form_compares_both_orderings(self, small_context):
        report = verify_suite("closed-form", small_context)
        ordering = [c for c in report.checks if "ordering" in c.label][0]
        assert "jump-first" in ordering.notes
        assert "decay-first" in ordering.notes
        assert ordering.passed

    def test_hybrid_chain_rotation_signs(self, small_context):
        report = verify_suite("hybrid-chain", small_context)
        signs = [c for c in report.checks if "R_y(pi/4) s" in c.label]
        assert len(signs) == 2 and all(c.passed for c in signs)

    def test_sideband_orientation_is_recorded_not_asserted(self, small_context):
        report = verify_suite("sideband", small_context)
        orientation = [c for c in report.checks if c.label.endswith("orientation")]
        assert orientation and all(c.informational for c in orientation)
        fidelity = [c for c in report.checks if "RWA fidelity" in c.label]
        assert len(fidelity) == 2 and all(c.informational for c in fidelity)


class TestSuiteReportModel:
    def test_passed_ignores_informational_checks(self):
        report = SuiteReport(suite="x", checks=[
            DeviationReport.measure("a", 1e-13, 1e-10),
            DeviationReport.measure("b", 1.0, 1e-10, informational=True),
        ])
        assert report.passed
        assert report.to_json_dict()["passed"] is True

    def test_failing_check_fails_the_suite(self):
        report = SuiteReport(suite="x", checks=[DeviationReport.measure("a", 1.0, 1e-10)])
        assert not report.passed

    def test_context_defaults_follow_settings(self):
        ctx = SuiteContext()
        assert (ctx.buffer_cav, ctx.buffer_mech, ctx.guard_mech) == (1, 4, 16)
        assert ctx.step == pytest.approx(1e-3 * ctx.period)

    def test_guard_widening(self, small_space):
        ctx = SuiteContext()
        assert ctx.guarded(small_space).n_mech == small_space.n_mech + 16
        assert ctx.guarded(small_space, factor=2).n_mech == small_space.n_mech + 32
        assert ctx.guarded(small_space, factor=2).n_cavity == small_space.n_cavity


@pytest.fixture(scope="module")
def default_reports():
    ctx = SuiteContext()
    cache = {}

    def report(name):
        if name not in cache:
            cache[name] = verify_suite(name, ctx)
        return cache[name]

    return report


def _check(report, fragment):
    return [c for c in report.checks if fragment in c.label][0]


@pytest.mark.slow
class TestDefaultConfiguration:
    @pytest.mark.parametrize("name", ["hybrid-chain", "sideband", "rwa-average", "damped-reduction",
                                      "closed-form"])
    def test_suite_passes(self, name, default_reports):
        report = default_reports(name)
        failing = [c.label for c in report.checks if not c.passed and not c.informational]
        assert failing == []
        assert report.passed

    def test_evolution_ordering_uses_widened_guard(self, default_reports):
        ordering = _check(default_reports("hybrid-chain"), "evolution operator ordering")
        assert ordering.passed
        assert "32 guard levels" in ordering.notes
        derived = ordering.candidates["T D R^dag exp(-i H_a t) R D^dag T^dag"]
        printed = ordering.candidates["T D R exp(-i H_a t) R^dag D^dag T^dag as printed"]
        assert derived < PROPAGATOR_TOL
        assert printed > PROPAGATOR_TOL

    def test_decay_first_closed_form_is_rejected(self, default_reports):
        ordering = _check(default_reports("closed-form"), "superoperator ordering")
        assert ordering.candidates["jump-first"] < CLOSED_FORM_TOL
        assert ordering.candidates["decay-first"] > CLOSED_FORM_TOL

    def test_printed_dephasing_is_rejected(self, default_reports):
        relation = _check(default_reports("damped-reduction"), "conjugation relation")
        assert relation.candidates["derived dephasing"] < DISPLACEMENT_TOL
        assert relation.candidates["printed dephasing"] > DISPLACEMENT_TOL

    def test_rwa_fidelity_states_its_regime(self, default_reports):
        fidelity = [c for c in default_reports("sideband").checks if "RWA fidelity" in c.label]
        assert len(fidelity) == 2
        for check in fidelity:
            assert check.informational
            assert "resolved-sideband regime" in check.notes
            assert "light-shift phase" in check.notes
