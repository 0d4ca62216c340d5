import logging
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, TextIO, Tuple, TypeVar

import numpy as np

from optomech.api.io import dumps_json, suffixed, write_csv, write_json, write_matrix
from optomech.core.exceptions import InvalidArgumentError, StateSpecError
from optomech.models.space import HilbertSpace, OperatorMatrix, QuantumState, Subsystem
from optomech.physics.fock_core import (
    coherent_vector,
    fock_vector,
    ladder_operators,
    pauli_operators,
    states,
    thermal_weights,
)
from optomech.physics.hamiltonians import MODELS, build_model, model_entry, model_hamiltonian
from optomech.physics.open_dynamics import (
    LindbladGenerator,
    TimeSeries,
    damped_master_generator,
    displaced_master_generator,
    free_damped_generator,
    hamiltonian_generator,
    rk4_propagate,
)
from optomech.physics.sideband_analysis import cm_drive, compare_bands, coupling_grid
from optomech.physics.suites import SuiteContext, verify_suite
from optomech.schemas.params import SidebandSpec
from optomech.schemas.report import SuiteReport
from optomech.schemas.run_config import RunConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")

GENERATORS: Dict[str, Callable] = {
    "damped": damped_master_generator,
    "displaced": displaced_master_generator,
    "free-damped": free_damped_generator,
}

SWEEP_PATTERN = re.compile(r"^(?P<key>[A-Za-z_][A-Za-z0-9_]*)=(?P<start>[^:]+):(?P<stop>[^:]+):(?P<count>\d+)$")
SWEEP_ALIASES = {"lambda": "lambda_"}


def config_space(config: RunConfig) -> HilbertSpace:
    return HilbertSpace(config.n_cavity, config.n_mech, config.has_qubit)


def _default_out(config: RunConfig, name: str) -> Path:
    return Path(config.out_dir) / name


# build

def cmd_build(config: RunConfig, model_id: str, out_path=None) -> Path:
    model_entry(model_id)
    op = build_model(model_id, config.params, config_space(config), config.time, config.displacement_method)
    path = Path(out_path) if out_path else _default_out(config, f"{model_id}.json")
    write_matrix(path, op, model_id, config.params.to_json_dict())
    logger.info(f"Model '{model_id}' ({op.space}) written to {path}")
    return path


# verify

def cmd_verify(config: RunConfig, suite_id: str, out_path=None, workers: int = 1,
               stream: Optional[TextIO] = None) -> SuiteReport:
    """Run a suite, print its JSON report and write it to a file."""
    report = verify_suite(suite_id, SuiteContext.from_config(config), workers=workers)
    text = dumps_json(report.to_json_dict())
    (stream or sys.stdout).write(text)
    path = Path(out_path) if out_path else _default_out(config, f"verify_{suite_id}.json")
    write_json(path, report.to_json_dict())
    logger.info(f"Suite '{suite_id}' report written to {path} (passed={report.passed})")
    return report


# evolve

def _mode_density(spec: str, dimension: int, token: str) -> np.ndarray:
    kind, _, args = token.partition(":")
    try:
        if kind == "fock":
            vec = fock_vector(dimension, int(args))
        elif kind == "coherent":
            parts = [float(x) for x in args.split(",")]
            if len(parts) not in (1, 2):
                raise StateSpecError(spec, f"coherent amplitude '{args}' must be re or re,im")
            vec = coherent_vector(dimension, complex(parts[0], parts[1] if len(parts) == 2 else 0.0))
        elif kind == "thermal":
            return np.diag(thermal_weights(dimension, float(args))).astype(np.complex128)
        else:
            raise StateSpecError(spec, f"unknown state kind '{kind}', use fock, coherent or thermal")
    except ValueError:
        raise StateSpecError(spec, f"cannot parse '{token}'")
    except InvalidArgumentError as e:
        raise StateSpecError(spec, e.detail)
    return np.outer(vec, vec.conj())


def parse_state(spec: str, space: HilbertSpace) -> QuantumState:
    """'qubit=e|g; cavity=fock:k|coherent:re,im|thermal:nbar; mech=...'

    Factors left out stay in |g> or the vacuum.
    """
    densities = {}
    for segment in filter(None, (s.strip() for s in (spec or "").split(";"))):
        factor, sep, token = segment.partition("=")
        factor, token = factor.strip(), token.strip()
        if not sep or not token:
            raise StateSpecError(spec, f"segment '{segment}' is not factor=value")
        if factor not in {f.value for f in Subsystem}:
            raise StateSpecError(spec, f"unknown factor '{factor}', use qubit, cavity or mech")
        if factor in densities:
            raise StateSpecError(spec, f"factor '{factor}' given twice")
        which = Subsystem(factor)
        if which is Subsystem.QUBIT:
            if not space.has_qubit:
                raise StateSpecError(spec, f"{space} has no qubit factor")
            if token not in ("e", "g"):
                raise StateSpecError(spec, f"qubit state '{token}' must be e or g")
            vec = fock_vector(2, 0 if token == "e" else 1)
            densities[factor] = np.outer(vec, vec.conj())
        else:
            densities[factor] = _mode_density(spec, space.factor_dim(which), token)
    return states(space).product(densities)


def observable_catalog(space: HilbertSpace) -> Dict[str, OperatorMatrix]:
    ops = ladder_operators(space)
    catalog = {"n_a": ops.n_a, "n_b": ops.n_b, "x_b": ops.b + ops.bdag}
    if space.has_qubit:
        catalog["sz"] = pauli_operators(space).sz
    return catalog


def evolution_generator(config: RunConfig, target: str) -> LindbladGenerator:
    """Generator for a damped-section generator id or a catalog model id."""
    if target in GENERATORS:
        return GENERATORS[target](config.params, config_space(config))
    entry = model_entry(target)
    if target == "cm" and config.displacement_method == "laguerre":
        space = HilbertSpace(config.n_cavity, config.n_mech, False)
        drive = cm_drive(config.params, space)
        return LindbladGenerator(
            hamiltonian=np.zeros((space.dim, space.dim), dtype=np.complex128),
            drive=drive,
            space=space,
            label=target,
        )
    space, at = model_hamiltonian(target, config.params, config_space(config))
    method = config.displacement_method
    return hamiltonian_generator(lambda t: at(t, method), space, entry.time_dependent, label=target)


def cmd_evolve(config: RunConfig, target: str, state_spec: str, out_path=None) -> Tuple[Path, TimeSeries]:
    if target not in GENERATORS and target not in MODELS:
        raise InvalidArgumentError(
            f"Unknown evolution target '{target}'. Valid targets: {', '.join([*GENERATORS, *MODELS])}"
        )
    gen = evolution_generator(config, target)
    rho0 = parse_state(state_spec, gen.space)
    catalog = observable_catalog(gen.space)
    missing = [name for name in config.observables if name not in catalog]
    if missing:
        raise InvalidArgumentError(f"observables {missing} are not defined on {gen.space}")
    observables = {name: catalog[name] for name in config.observables}

    series = rk4_propagate(
        gen,
        rho0,
        config.t_max,
        config.step,
        observables=observables,
        record_every=config.record_every,
        eig_every=config.eig_every,
    )
    path = Path(out_path) if out_path else _default_out(config, f"evolve_{target}.csv")
    write_csv(path, series.header, series.rows())
    logger.info(
        f"Evolved '{target}' to t={config.t_max:.4g}: {len(series.times)} records, "
        f"trace drift {series.max_trace_drift():.2e}, written to {path}"
    )
    return path, series


# sidebands

SIDEBAND_COLUMNS = ["alpha", "s", "sign", "band", "coupling_magnitude"]


def cmd_sidebands(config: RunConfig, out_path=None) -> Tuple[Path, Path]:
    """Coupling grid as CSV plus the printed-vs-Fourier orientation report in <stem>.report.json."""
    space = HilbertSpace(config.n_cavity, config.n_mech, False)
    rows = coupling_grid(config.params, space, config.sideband_alphas, config.sideband_orders)
    csv_path = Path(out_path) if out_path else _default_out(config, "sidebands.csv")
    write_csv(csv_path, SIDEBAND_COLUMNS, [[row[c] for c in SIDEBAND_COLUMNS] for row in rows])

    comparisons = []
    for alpha in config.sideband_alphas:
        for s in config.sideband_orders:
            for sign in (1, -1):
                spec = SidebandSpec(s=s, sign=sign, alpha=alpha)
                comparisons.append(compare_bands(config.params, space, spec).to_json_dict())
    report = {
        "params": config.params.to_json_dict(),
        "comparisons": comparisons,
        "orientation_match": all(c["orientation_match"] for c in comparisons),
    }
    json_path = csv_path.with_name(f"{csv_path.stem}.report.json")
    write_json(json_path, report)
    logger.info(f"Sideband grid ({len(rows)} rows) written to {csv_path}, orientation report to {json_path}")
    return csv_path, json_path


# sweeps

def parse_sweep(sweep: str) -> Tuple[str, List[float]]:
    """KEY=START:STOP:N -> (field name, N evenly spaced values)."""
    match = SWEEP_PATTERN.match(sweep.strip())
    if not match:
        raise InvalidArgumentError(f"Sweep '{sweep}' must look like KEY=START:STOP:N")
    key = SWEEP_ALIASES.get(match["key"], match["key"])
    if key not in RunConfig.model_fields:
        raise InvalidArgumentError(f"Sweep key '{match['key']}' is not a run configuration field")
    try:
        start, stop = float(match["start"]), float(match["stop"])
    except ValueError:
        raise InvalidArgumentError(f"Sweep bounds in '{sweep}' must be numbers")
    count = int(match["count"])
    if count < 1:
        raise InvalidArgumentError("Sweep needs at least one point")
    return key, [float(v) for v in np.linspace(start, stop, count)]


def sweep_configs(config: RunConfig, sweep: str) -> List[Tuple[float, RunConfig]]:
    key, values = parse_sweep(sweep)
    base = config.model_dump()
    points = []
    for value in values:
        cast = int(value) if isinstance(base[key], int) and not isinstance(base[key], bool) else value
        points.append((value, RunConfig.model_validate({**base, key: cast})))
    return points


def run_sweep(config: RunConfig, sweep: str, out_path, default_name: str,
              command: Callable[[RunConfig, Path], T], workers: int = 1) -> List[Tuple[float, T]]:
    """Run `command` at every sweep point; outputs are suffixed with the point value."""
    points = sweep_configs(config, sweep)
    base_path = Path(out_path) if out_path else _default_out(config, default_name)
    logger.info(f"Sweep {sweep}: {len(points)} points on {max(workers, 1)} worker(s)")

    def run(point: Tuple[float, RunConfig]) -> Tuple[float, T]:
        value, point_config = point
        return value, command(point_config, suffixed(base_path, value))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, points))
    return [run(point) for point in points]
