import argparse
import json
import logging
import sys
import time
from io import StringIO
from typing import List, Optional

from pydantic import ValidationError

from optomech.api.commands import (
    cmd_build,
    cmd_evolve,
    cmd_sidebands,
    cmd_verify,
    run_sweep,
)
from optomech.api.io import dumps_json
from optomech.config import settings
from optomech.core.exceptions import EXIT_ERROR, EXIT_VERIFICATION_FAILED, InvalidArgumentError, OptomechError
from optomech.core.logging import setup_logging
from optomech.physics.hamiltonians import MODELS
from optomech.physics.suites import SUITES
from optomech.schemas.run_config import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optomech",
        description="Operator identities, master equations and sideband couplings of optomechanical systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    parser.add_argument("--log-level", default=None, help="Overrides OPTOMECH_LOG_LEVEL")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="Output file")
    common.add_argument("--sweep", metavar="KEY=START:STOP:N", help="Fan out over a parameter")
    common.add_argument("--workers", type=int, default=1, help="Threads for sweeps and suite checks")

    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", parents=[common], help="Write a model Hamiltonian as JSON")
    build.add_argument("--model", required=True, help=f"One of: {', '.join(MODELS)}")

    verify = sub.add_parser("verify", parents=[common], help="Run a verification suite")
    verify.add_argument("--suite", required=True, help=f"One of: {', '.join(SUITES)}")

    evolve = sub.add_parser("evolve", parents=[common], help="Propagate a density matrix with RK4")
    evolve.add_argument("--model", required=True, help="Model id or damped, displaced, free-damped")
    evolve.add_argument("--state", default="", metavar="SPEC",
                        help="e.g. 'cavity=fock:1; mech=coherent:0.5,0'")

    sub.add_parser("sidebands", parents=[common], help="Sideband coupling grid and orientation report")
    return parser


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        config = RunConfig()
    else:
        try:
            config = RunConfig.from_file(path)
        except OSError as e:
            raise InvalidArgumentError(f"Cannot read config '{path}': {e.strerror or e}")
        except json.JSONDecodeError as e:
            raise InvalidArgumentError(f"Config '{path}' is not valid JSON: {e}")
    return config.with_seed_override()


def _verify(config: RunConfig, args) -> int:
    if args.sweep:
        points = run_sweep(
            config, args.sweep, args.out, f"verify_{args.suite}.json",
            lambda cfg, path: cmd_verify(cfg, args.suite, path, stream=StringIO()),
            workers=args.workers,
        )
        sys.stdout.write(dumps_json({
            "sweep": args.sweep,
            "points": [{"value": value, **report.to_json_dict()} for value, report in points],
            "passed": all(report.passed for _, report in points),
        }))
        passed = all(report.passed for _, report in points)
    else:
        passed = cmd_verify(config, args.suite, args.out, workers=args.workers).passed
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def dispatch(args) -> int:
    config = load_config(args.config)
    if args.command == "verify":
        return _verify(config, args)

    if args.command == "build":
        command = lambda cfg, path: cmd_build(cfg, args.model, path)
        default_name = f"{args.model}.json"
    elif args.command == "evolve":
        command = lambda cfg, path: cmd_evolve(cfg, args.model, args.state, path)
        default_name = f"evolve_{args.model}.csv"
    else:
        command = lambda cfg, path: cmd_sidebands(cfg, path)
        default_name = "sidebands.csv"

    if args.sweep:
        run_sweep(config, args.sweep, args.out, default_name, command, workers=args.workers)
    else:
        command(config, args.out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)
    try:
        setup_logging(args.log_level, command=args.command)
    except ValueError:
        parser.error(f"unknown log level '{args.log_level}'")
    if args.workers < 1:
        parser.error("--workers must be at least 1")

    start_time = time.time()
    try:
        code = dispatch(args)
    except OptomechError as e:
        logger.error(e.detail)
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"error: invalid configuration: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        return EXIT_ERROR
    logger.info(f"{args.command} finished in {time.time() - start_time:.2f}s with exit code {code}")
    return code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
