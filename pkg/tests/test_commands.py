import csv
import io
import json

import numpy as np
import pytest

from optomech.api.commands import (
    cmd_build,
    cmd_evolve,
    cmd_sidebands,
    cmd_verify,
    evolution_generator,
    observable_catalog,
    parse_state,
    parse_sweep,
    run_sweep,
    sweep_configs,
)
from optomech.api.io import read_json, read_matrix
from optomech.core.exceptions import InvalidArgumentError, StateSpecError, UnknownModelError
from optomech.models.space import HilbertSpace
from optomech.physics.hamiltonians import build_model, h_cm


pytestmark = pytest.mark.integration


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestBuild:
    def test_uncoupled_standard_model(self, run_config):
        config = run_config.model_copy(update={"g": 0.0})
        op, metadata = read_matrix(cmd_build(config, "standard"))
        cav, mech = HilbertSpace(3, 8).level_grids()
        assert np.array_equal(np.diag(op.entries).real, 100.0 * cav + 1.0 * mech)
        assert metadata["model"] == "standard"
        assert metadata["params"]["lambda"] == 0.1

    def test_matches_the_builder(self, run_config, tmp_path):
        op, _ = read_matrix(cmd_build(run_config, "displaced", tmp_path / "d.json"))
        expected = build_model("displaced", run_config.params, HilbertSpace(3, 8))
        assert np.array_equal(op.entries, expected.entries)

    def test_hybrid_kerr_block(self, run_config):
        op, _ = read_matrix(cmd_build(run_config, "hybrid-K"))
        assert op.space.dims == (2, 3, 8)
        cav, _ = op.space.level_grids()
        kerr = run_config.g ** 2 / run_config.omega_m
        assert np.allclose(op.entries, np.diag(-kerr * (cav - 0.5) ** 2), atol=1e-15)

    def test_unknown_model(self, run_config):
        with pytest.raises(UnknownModelError):
            cmd_build(run_config, "polaron")


class TestVerify:
    def test_report_goes_to_stream_and_file(self, run_config, tmp_path):
        stream = io.StringIO()
        report = cmd_verify(run_config, "rearrangement", tmp_path / "r.json", stream=stream)
        assert report.passed
        printed = json.loads(stream.getvalue())
        assert printed == read_json(tmp_path / "r.json")
        assert printed["suite"] == "rearrangement"
        assert printed["passed"] is True


class TestStateParsing:
    def test_default_is_reference_state(self, hybrid_space):
        rho = parse_state("", hybrid_space).density()
        assert rho[hybrid_space.dim // 2, hybrid_space.dim // 2] == pytest.approx(1.0)

    def test_product_of_named_factors(self, small_space):
        rho = parse_state("cavity=fock:1; mech=thermal:0.5", small_space).density()
        assert np.trace(rho).real == pytest.approx(1.0)
        n_a = observable_catalog(small_space)["n_a"].entries
        assert np.trace(n_a @ rho).real == pytest.approx(1.0)

    def test_coherent_amplitude(self, small_space):
        rho = parse_state("mech=coherent:0.3,0.4", small_space).density()
        n_b = observable_catalog(small_space)["n_b"].entries
        assert np.trace(n_b @ rho).real == pytest.approx(0.25, rel=1e-6)

    @pytest.mark.parametrize("spec", [
        "cavity",
        "spin=e",
        "cavity=fock:1; cavity=fock:2",
        "cavity=squeezed:1",
        "cavity=fock:x",
        "cavity=fock:9",
        "mech=thermal:-1",
        "mech=coherent:1,2,3",
        "qubit=e",
    ])
    def test_rejected_specs(self, small_space, spec):
        with pytest.raises(StateSpecError):
            parse_state(spec, small_space)

    def test_qubit_state_must_be_e_or_g(self, hybrid_space):
        with pytest.raises(StateSpecError):
            parse_state("qubit=+", hybrid_space)

    def test_observables(self, small_space, hybrid_space):
        assert set(observable_catalog(small_space)) == {"n_a", "n_b", "x_b"}
        assert "sz" in observable_catalog(hybrid_space)


class TestEvolve:
    def test_damped_mechanical_decay(self, run_config):
        path, series = cmd_evolve(run_config, "damped", "mech=fock:1")
        rows = _read_csv(path)
        assert list(rows[0]) == ["t", "trace", "min_eig", "n_a_re", "n_a_im", "n_b_re", "n_b_im"]
        assert len(rows) == 11
        for row in rows:
            t = float(row["t"])
            assert float(row["n_b_re"]) == pytest.approx(np.exp(-2 * run_config.gamma * t), abs=1e-6)
            assert float(row["trace"]) == pytest.approx(1.0, abs=1e-10)
        assert path.name == "evolve_damped.csv"

    def test_closed_model_conserves_photons(self, run_config, tmp_path):
        _, series = cmd_evolve(run_config, "standard", "cavity=fock:1", tmp_path / "s.csv")
        assert np.allclose(np.array(series.expectations["n_a"]).real, 1.0, atol=1e-10)

    def test_cm_fast_path_matches_builder(self, run_config):
        config = run_config.model_copy(update={"displacement_method": "laguerre"})
        gen = evolution_generator(config, "cm")
        expected = h_cm(config.params, HilbertSpace(3, 8), 0.3, method="laguerre").entries
        assert np.max(np.abs(gen.hamiltonian_at(0.3) - expected)) < 1e-12

    def test_cm_evolution_keeps_unit_trace(self, run_config, tmp_path):
        config = run_config.model_copy(update={"displacement_method": "laguerre"})
        path, series = cmd_evolve(config, "cm", "cavity=fock:1", tmp_path / "cm.csv")
        assert series.max_trace_drift() < 1e-8
        assert all(abs(float(row["trace"]) - 1.0) < 1e-8 for row in _read_csv(path))

    def test_outputs_are_deterministic(self, run_config, tmp_path):
        first, _ = cmd_evolve(run_config, "displaced", "cavity=thermal:0.5; mech=fock:1", tmp_path / "a.csv")
        second, _ = cmd_evolve(run_config, "displaced", "cavity=thermal:0.5; mech=fock:1", tmp_path / "b.csv")
        assert first.read_bytes() == second.read_bytes()

    def test_unknown_target(self, run_config):
        with pytest.raises(InvalidArgumentError):
            cmd_evolve(run_config, "lossy", "")

    def test_observable_outside_the_space(self, run_config):
        config = run_config.model_copy(update={"has_qubit": True, "observables": ["sz"]})
        with pytest.raises(InvalidArgumentError):
            cmd_evolve(config, "standard", "cavity=fock:1")


class TestSidebands:
    def test_grid_and_orientation_report(self, run_config):
        csv_path, json_path = cmd_sidebands(run_config)
        rows = _read_csv(csv_path)
        assert list(rows[0]) == ["alpha", "s", "sign", "band", "coupling_magnitude"]
        carrier = [r for r in rows if float(r["alpha"]) == 0.0 and r["s"] == "0"]
        assert carrier
        assert all(float(r["coupling_magnitude"]) == pytest.approx(0.5 * run_config.Omega) for r in carrier)
        report = read_json(json_path)
        assert report["params"]["lambda"] == 0.1
        assert report["orientation_match"] is False
        zero_order = [c for c in report["comparisons"] if c["printed_band"] == 0]
        assert zero_order and all(c["orientation_match"] for c in zero_order)

    def test_report_never_replaces_the_grid(self, run_config, tmp_path):
        csv_path, json_path = cmd_sidebands(run_config, tmp_path / "grid.json")
        assert json_path.name == "grid.report.json"
        assert csv_path.read_text().splitlines()[0] == "alpha,s,sign,band,coupling_magnitude"
        assert "comparisons" in read_json(json_path)


class TestSweeps:
    def test_parse(self):
        key, values = parse_sweep("lambda=0:1:3")
        assert key == "lambda_"
        assert values == [0.0, 0.5, 1.0]

    @pytest.mark.parametrize("sweep", ["g=0:1", "g=a:1:3", "unknown=0:1:2", "g=0:1:0"])
    def test_invalid_sweeps(self, sweep):
        with pytest.raises(InvalidArgumentError):
            parse_sweep(sweep)

    def test_integer_fields_are_cast(self, run_config):
        points = sweep_configs(run_config, "n_mech=6:8:3")
        assert [cfg.n_mech for _, cfg in points] == [6, 7, 8]
        assert all(cfg.g == run_config.g for _, cfg in points)

    @pytest.mark.parametrize("workers", [1, 3])
    def test_outputs_are_suffixed(self, run_config, tmp_path, workers):
        results = run_sweep(run_config, "g=0:0.2:3", tmp_path / "std.json", "standard.json",
                            lambda cfg, path: cmd_build(cfg, "standard", path), workers=workers)
        assert [value for value, _ in results] == [0.0, 0.1, 0.2]
        assert sorted(p.name for p in tmp_path.glob("std_*.json")) == ["std_0.0.json", "std_0.1.json",
                                                                        "std_0.2.json"]
        _, metadata = read_matrix(tmp_path / "std_0.2.json")
        assert metadata["params"]["g"] == 0.2
