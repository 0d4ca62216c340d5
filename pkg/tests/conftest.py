import json

import pytest

from optomech.models.space import HilbertSpace
from optomech.physics.suites import SuiteContext
from optomech.schemas.params import ModelParams
from optomech.schemas.run_config import RunConfig


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def small_space():
    return HilbertSpace(n_cavity=4, n_mech=12)


@pytest.fixture
def hybrid_space():
    return HilbertSpace(n_cavity=4, n_mech=12, has_qubit=True)


@pytest.fixture
def default_space():
    return HilbertSpace()


@pytest.fixture
def small_context(params):
    return SuiteContext(
        params=params,
        space=HilbertSpace(n_cavity=4, n_mech=14),
        buffer_cav=1,
        buffer_mech=4,
        guard_mech=16,
        samples=4,
        closed_form_states=3,
        closed_form_support=4,
        fidelity_periods=2.0,
    )


@pytest.fixture
def sample_config_data():
    return {
        "omega_c": 100.0,
        "omega_m": 1.0,
        "g": 0.1,
        "gamma": 0.05,
        "Omega": 0.2,
        "lambda": 0.1,
        "nbar": 1.0,
        "n_cavity": 3,
        "n_mech": 8,
        "t_max": 1.0,
        "dt": 0.01,
        "record_every": 10,
        "observables": ["n_a", "n_b"],
        "seed": 7,
    }


@pytest.fixture
def run_config(sample_config_data, tmp_path):
    return RunConfig.model_validate({**sample_config_data, "out_dir": str(tmp_path / "results")})


@pytest.fixture
def config_file(sample_config_data, tmp_path):
    path = tmp_path / "config.json"
    data = {**sample_config_data, "out_dir": str(tmp_path / "results")}
    path.write_text(json.dumps(data), encoding="utf-8")
    return path
