import json

import pytest

from optomech.config import settings
from optomech.core.exceptions import EXIT_VERIFICATION_FAILED
from optomech.main import EXIT_OK, create_parser, load_config, main
from optomech.schemas.report import DeviationReport, SuiteReport


pytestmark = pytest.mark.integration


class TestParser:
    def test_subcommands(self):
        args = create_parser().parse_args(["evolve", "--model", "damped", "--state", "mech=fock:1",
                                           "--workers", "2"])
        assert args.command == "evolve"
        assert args.state == "mech=fock:1"
        assert args.workers == 2

    def test_model_is_required(self):
        with pytest.raises(SystemExit):
            create_parser().parse_args(["build"])

    def test_workers_must_be_positive(self):
        with pytest.raises(SystemExit):
            main(["verify", "--suite", "rearrangement", "--workers", "0"])

    def test_unknown_log_level(self):
        with pytest.raises(SystemExit):
            main(["--log-level", "chatty", "sidebands"])


class TestConfigLoading:
    def test_defaults_without_a_file(self):
        config = load_config(None)
        assert config.n_cavity == settings.n_cavity

    def test_seed_override(self, config_file, monkeypatch):
        monkeypatch.setattr(settings, "seed", 42)
        assert load_config(str(config_file)).seed == 42

    def test_seed_from_file(self, config_file, monkeypatch):
        monkeypatch.setattr(settings, "seed", None)
        assert load_config(str(config_file)).seed == 7


class TestExitCodes:
    def test_verify_passes(self, config_file, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(["verify", "--suite", "rearrangement", "--config", str(config_file), "--out", str(out)])
        assert code == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert printed["passed"] is True
        assert json.loads(out.read_text()) == printed

    def test_verification_failure(self, config_file, tmp_path, monkeypatch):
        failing = SuiteReport(suite="rearrangement", checks=[DeviationReport.measure("broken", 1.0, 1e-10)])
        monkeypatch.setattr("optomech.api.commands.verify_suite", lambda *args, **kwargs: failing)
        code = main(["verify", "--suite", "rearrangement", "--config", str(config_file),
                     "--out", str(tmp_path / "r.json")])
        assert code == EXIT_VERIFICATION_FAILED

    def test_unknown_suite(self, config_file, capsys):
        code = main(["verify", "--suite", "rabi", "--config", str(config_file)])
        assert code == 1
        assert "Unknown suite 'rabi'" in capsys.readouterr().err

    def test_invalid_config(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n_cavity": 1}))
        assert main(["build", "--model", "standard", "--config", str(path)]) == 1
        assert "invalid configuration" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert main(["build", "--model", "standard", "--config", str(tmp_path / "none.json")]) == 1

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert main(["sidebands", "--config", str(path)]) == 1
        assert "not valid JSON" in capsys.readouterr().err


class TestCommands:
    def test_build_writes_matrix(self, config_file, tmp_path):
        out = tmp_path / "h.json"
        assert main(["build", "--model", "hybrid", "--config", str(config_file), "--out", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["dims"] == [2, 3, 8]
        assert doc["metadata"]["model"] == "hybrid"

    def test_evolve_sweep(self, config_file, tmp_path):
        out = tmp_path / "e.csv"
        code = main(["evolve", "--model", "free-damped", "--state", "mech=fock:1", "--config", str(config_file),
                     "--out", str(out), "--sweep", "gamma=0.05:0.1:2", "--workers", "2"])
        assert code == EXIT_OK
        assert (tmp_path / "e_0.05.csv").exists()
        assert (tmp_path / "e_0.1.csv").exists()

    def test_verify_sweep_combines_points(self, config_file, tmp_path, capsys):
        code = main(["verify", "--suite", "rearrangement", "--config", str(config_file),
                     "--out", str(tmp_path / "v.json"), "--sweep", "g=0.05:0.1:2"])
        assert code == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert [p["value"] for p in printed["points"]] == [0.05, 0.1]
        assert printed["passed"] is True
        assert (tmp_path / "v_0.05.json").exists()
