"""Atomic result files.

Both formats round-trip every double exactly. JSON floats go through repr, the shortest
string that parses back to the same value; CSV cells use 17 significant digits (%.17g),
which is longer but equally exact.
"""
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from optomech import __version__
from optomech.core.exceptions import DimensionMismatchError, OutputWriteError
from optomech.models.space import HilbertSpace, OperatorMatrix

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def _atomic_write(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        logger.error(f"Failed writing {path}: {e}")
        raise OutputWriteError(path, e.strerror or str(e))
    logger.debug(f"Wrote {path}")
    return path


def _plain(value: Any) -> Any:
    """numpy scalars and complex numbers to JSON-native values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


def dumps_json(payload: Any) -> str:
    # float repr is the shortest string that round-trips
    return json.dumps(_plain(payload), indent=2) + "\n"


def write_json(path, payload: Any) -> Path:
    return _atomic_write(path, dumps_json(payload))


def read_json(path) -> Any:
    with open(Path(path), "r", encoding="utf-8") as fh:
        return json.load(fh)


def format_csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise DimensionMismatchError(len(header), len(row), "CSV row")
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return CSV_FLOAT_FORMAT % float(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    return _atomic_write(path, format_csv(header, rows))


def matrix_document(op: OperatorMatrix, model_id: str, params: Optional[Dict] = None) -> Dict:
    flat = op.entries.reshape(-1)
    return {
        "dims": list(op.space.dims),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
        "metadata": {
            "model": model_id,
            "params": params or {},
            "version": __version__,
        },
    }


def write_matrix(path, op: OperatorMatrix, model_id: str, params: Optional[Dict] = None) -> Path:
    return write_json(path, matrix_document(op, model_id, params))


def read_matrix(path) -> Tuple[OperatorMatrix, Dict]:
    """Read a matrix document back; entries are row-major [re, im] pairs."""
    doc = read_json(path)
    dims = [int(d) for d in doc["dims"]]
    if len(dims) == 3:
        if dims[0] != 2:
            raise DimensionMismatchError(2, dims[0], "qubit factor")
        space = HilbertSpace(dims[1], dims[2], True)
    elif len(dims) == 2:
        space = HilbertSpace(dims[0], dims[1], False)
    else:
        raise DimensionMismatchError("2 or 3 factors", len(dims), "matrix dims")
    pairs = np.asarray(doc["entries"], dtype=float)
    if pairs.shape != (space.dim * space.dim, 2):
        raise DimensionMismatchError((space.dim * space.dim, 2), pairs.shape, "matrix entries")
    entries = np.empty(pairs.shape[0], dtype=np.complex128)
    entries.real, entries.imag = pairs[:, 0], pairs[:, 1]
    return OperatorMatrix(space, entries.reshape(space.dim, space.dim)), doc.get("metadata", {})


def suffixed(path, value: float) -> Path:
    """out.csv -> out_<value>.csv for sweep points."""
    path = Path(path)
    return path.with_name(f"{path.stem}_{value!r}{path.suffix}")
