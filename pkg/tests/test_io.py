import json

import numpy as np
import pytest

from optomech import __version__
from optomech.api.io import (
    dumps_json,
    format_csv,
    read_json,
    read_matrix,
    suffixed,
    write_csv,
    write_json,
    write_matrix,
)
from optomech.core.exceptions import DimensionMismatchError, OutputWriteError
from optomech.models.space import HilbertSpace, OperatorMatrix


class TestJson:
    def test_floats_use_the_shortest_repr(self):
        text = dumps_json({"x": 0.1, "y": 1e-17})
        assert '"x": 0.1' in text
        assert '"y": 1e-17' in text
        assert text.endswith("\n")

    def test_numpy_and_complex_values(self):
        payload = json.loads(dumps_json({"a": np.float64(2.5), "n": np.int64(3), "z": 1 - 2j,
                                         "v": np.array([1.0, 2.0]), "ok": np.bool_(True)}))
        assert payload == {"a": 2.5, "n": 3, "z": [1.0, -2.0], "v": [1.0, 2.0], "ok": True}

    def test_write_is_atomic(self, tmp_path):
        path = write_json(tmp_path / "nested" / "out.json", {"k": 1})
        assert read_json(path) == {"k": 1}
        assert [p.name for p in path.parent.iterdir()] == ["out.json"]

    def test_unwritable_target(self, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("x")
        with pytest.raises(OutputWriteError) as exc:
            write_json(blocker / "out.json", {})
        assert "Cannot write" in exc.value.detail


class TestCsv:
    def test_float_format_round_trips(self):
        text = format_csv(["t", "n"], [[0.1, 1], [1.0 / 3.0, 2]])
        lines = text.splitlines()
        assert lines[0] == "t,n"
        assert lines[1] == "0.10000000000000001,1"
        assert float(lines[2].split(",")[0]) == 1.0 / 3.0

    def test_csv_and_json_agree_on_values(self):
        values = [0.1, 1.0 / 3.0, np.pi, 1e-300, 2.0 ** -52, 123456789.123456789]
        lines = format_csv(["x"], [[v] for v in values]).splitlines()[1:]
        from_csv = [float(line) for line in lines]
        from_json = json.loads(dumps_json({"x": values}))["x"]
        assert from_csv == values
        assert from_json == values

    def test_booleans_as_integers(self):
        assert format_csv(["flag"], [[True], [False]]) == "flag\n1\n0\n"

    def test_row_length_checked(self):
        with pytest.raises(DimensionMismatchError):
            format_csv(["a", "b"], [[1.0]])

    def test_write_csv(self, tmp_path):
        path = write_csv(tmp_path / "series.csv", ["t"], [[0.0], [0.5]])
        assert path.read_text() == "t\n0\n0.5\n"


class TestMatrixDocuments:
    def test_round_trip_is_bit_exact(self, tmp_path):
        space = HilbertSpace(n_cavity=2, n_mech=3, has_qubit=True)
        rng = np.random.default_rng(3)
        entries = rng.normal(size=(space.dim, space.dim)) + 1j * rng.normal(size=(space.dim, space.dim))
        path = write_matrix(tmp_path / "m.json", OperatorMatrix(space, entries), "custom", {"g": 0.1})
        op, metadata = read_matrix(path)
        assert op.space.dims == (2, 2, 3)
        assert np.array_equal(op.entries, entries)
        assert metadata == {"model": "custom", "params": {"g": 0.1}, "version": __version__}

    def test_entries_are_row_major_pairs(self, tmp_path):
        space = HilbertSpace(n_cavity=2, n_mech=2)
        entries = np.zeros((4, 4), dtype=complex)
        entries[0, 1] = 2 + 3j
        path = write_matrix(tmp_path / "m.json", OperatorMatrix(space, entries), "custom")
        doc = read_json(path)
        assert doc["dims"] == [2, 2]
        assert doc["entries"][1] == [2.0, 3.0]
        assert len(doc["entries"]) == 16

    def test_bad_documents(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"dims": [3, 2, 2], "entries": []}))
        with pytest.raises(DimensionMismatchError):
            read_matrix(path)
        path.write_text(json.dumps({"dims": [2, 2], "entries": [[0.0, 0.0]]}))
        with pytest.raises(DimensionMismatchError):
            read_matrix(path)


def test_suffixed_paths(tmp_path):
    assert suffixed(tmp_path / "out.csv", 0.1).name == "out_0.1.csv"
    assert suffixed(tmp_path / "verify.json", 2.0).name == "verify_2.0.json"
