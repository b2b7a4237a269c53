"""
Command-line interface.

Results are printed to stdout as JSON; logs go to stderr.

Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 verification
suite failed.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ValidationError

from hugkit import __version__
from hugkit.core.config import settings
from hugkit.core.exceptions import HugError
from hugkit.core.logging_config import get_logger, setup_logging
from hugkit.schemas.experiment import ExperimentConfig, SweepConfig
from hugkit.schemas.verify import VerifySuite
from hugkit.services.energy_service import separation
from hugkit.services.experiment_service import experiment, sweep
from hugkit.services.gnc_service import gnc_report
from hugkit.services.optim_service import default_energy_config, minimize_energy
from hugkit.services.persistence_service import load_state
from hugkit.services.verify_service import verify

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_SUITE_FAILED = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(payload) -> None:
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2, by_alias=True)
    else:
        text = json.dumps(payload, indent=2)
    sys.stdout.write(text + "\n")


def _read_config(path: Path, model):
    try:
        return model.model_validate_json(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except ValidationError as exc:
        raise UsageError(f"invalid config {path}:\n{exc}")


def cmd_optimize(args: argparse.Namespace) -> int:
    if args.n < 2 or args.d < 2 or args.s == 0 or args.restarts < 1:
        raise UsageError("need --n >= 2, --d >= 2, --restarts >= 1 and a nonzero --s")
    cfg = default_energy_config(seed=args.seed, restarts=args.restarts)
    minimum = minimize_energy(args.n, args.d, args.s, cfg)
    sep, pair = separation(minimum.config)
    result = {
        "n": args.n,
        "d": args.d,
        "s": args.s,
        "energy": minimum.energy,
        "average_energy": minimum.energy / (args.n * (args.n - 1)),
        "separation": sep,
        "separation_pair": list(pair),
        "restart": minimum.restart,
        "energies": minimum.energies,
    }
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps({**result, "config": minimum.config.to_document()}, indent=2) + "\n")
        result["output"] = str(out)
    _emit(result)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _read_config(Path(args.config), ExperimentConfig)
    result = experiment(cfg, output_dir=args.out)
    _emit(result.manifest)
    return EXIT_OK


def cmd_diagnose(args: argparse.Namespace) -> int:
    state = load_state(args.state)
    _emit(gnc_report(state.features, state.labels, state.proxies))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify(VerifySuite(args.suite), seed=args.seed)
    _emit(report)
    return EXIT_OK if report.passed else EXIT_SUITE_FAILED


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _read_config(Path(args.config), SweepConfig)
    manifests = sweep(cfg)
    _emit([
        {"run_id": m.run_id, "seed": m.seed, "output_dir": m.config.output_dir,
         "final_loss": m.final_loss, "converged": m.converged}
        for m in manifests
    ])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hugkit", description="Hyperspherical uniformity gap toolkit")
    parser.add_argument("--version", action="version", version=f"hugkit {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    optimize = commands.add_parser("optimize", help="Minimize the Riesz s-energy of n points")
    optimize.add_argument("--n", type=int, required=True, help="Number of points")
    optimize.add_argument("--d", type=int, required=True, help="Ambient dimension")
    optimize.add_argument("--s", type=float, default=2.0, help="Riesz exponent")
    optimize.add_argument("--restarts", type=int, default=settings.DEFAULT_RESTARTS)
    optimize.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    optimize.add_argument("--out", help="Write the configuration JSON here")
    optimize.set_defaults(handler=cmd_optimize)

    train = commands.add_parser("train", help="Run one experiment from a JSON config")
    train.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    train.add_argument("--out", help="Output directory (overrides the config)")
    train.set_defaults(handler=cmd_train)

    diagnose = commands.add_parser("diagnose", help="GNC report of a saved state")
    diagnose.add_argument("--state", required=True, help="State JSON file")
    diagnose.set_defaults(handler=cmd_diagnose)

    check = commands.add_parser("verify", help="Run a verification suite")
    check.add_argument("--suite", required=True, choices=[s.value for s in VerifySuite])
    check.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    check.set_defaults(handler=cmd_verify)

    grid = commands.add_parser("sweep", help="Run a parameter grid")
    grid.add_argument("--config", required=True, help="SweepConfig JSON file")
    grid.set_defaults(handler=cmd_sweep)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        sys.stderr.write(f"hugkit: {exc}\n")
        return EXIT_USAGE
    except HugError as exc:
        logger.error(f"{exc.code}: {exc.message}", extra={"error_code": exc.code, "details": exc.details})
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
