"""Command line interface.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 I/O error.
"""
import argparse
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

import yaml

from gesture_engine.engine_control import EngineControl
from gesture_engine.interfaces.interface_engine_parameter import EngineConfig
from gesture_engine.utilities.load_config import apply_overrides, load_config

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4

log = logging.getLogger("Engine")


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one sub-command per pipeline stage."""
    parser = argparse.ArgumentParser(prog="gesture-engine", description="Text and speech driven gesture generation.")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    parser.add_argument("--log-file", type=Path, default=None, help="Append log messages to this file")
    commands = parser.add_subparsers(dest="command", required=True)

    def _with_config(sub: argparse.ArgumentParser, required: bool) -> None:
        sub.add_argument("--config", type=Path, required=required, help="Engine configuration yaml file")
        sub.add_argument(
            "--override", action="append", default=[], metavar="SECTION.FIELD=VALUE",
            help="Override a configuration value, may be repeated",
        )

    preprocess = commands.add_parser("preprocess", help="Encode motion data into feature tensors")
    source = preprocess.add_mutually_exclusive_group(required=True)
    source.add_argument("--bvh-dir", type=Path, help="Directory of BVH files with .txt/.wav sidecars")
    source.add_argument("--synthetic", action="store_true", help="Generate the synthetic corpus")
    _with_config(preprocess, required=True)
    preprocess.add_argument("--out", type=Path, required=True, help="Output directory")
    preprocess.add_argument("--seed", type=int, default=0)

    train = commands.add_parser("train", help="Train the denoiser")
    _with_config(train, required=True)
    train.add_argument("--data", type=Path, required=True, help="Directory written by preprocess")
    train.add_argument("--out", type=Path, required=True, help="Checkpoint file")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--plot", action="store_true", help="Save a loss curve figure next to the checkpoint")

    sample = commands.add_parser("sample", help="Generate a single clip")
    sample.add_argument("--model", type=Path, required=True, help="Checkpoint file")
    sample.add_argument("--text", default="", help="Text description, empty for speech only")
    sample.add_argument("--audio", type=Path, default=None, help="16 kHz mono WAV file")
    sample.add_argument("--frames", type=int, required=True)
    sample.add_argument("--gamma", type=float, default=1.0, help="Guidance weight, 0 conditions on audio only")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--out", type=Path, required=True, help="Output BVH file")
    sample.add_argument("--override", action="append", default=[], metavar="SECTION.FIELD=VALUE")

    compose = commands.add_parser("compose", help="Compose a long motion from a prompt script")
    compose.add_argument("--model", type=Path, required=True, help="Checkpoint file")
    compose.add_argument("--script", type=Path, required=True, help="Prompt script JSON file")
    compose.add_argument("--seed", type=int, default=0)
    compose.add_argument("--out", type=Path, required=True, help="Output BVH file")
    compose.add_argument("--override", action="append", default=[], metavar="SECTION.FIELD=VALUE")

    evaluate = commands.add_parser("eval", help="Evaluate generated motion against reference motion")
    evaluate.add_argument("--generated", type=Path, required=True, help="Directory of generated BVH files")
    evaluate.add_argument("--reference", type=Path, required=True, help="Directory of reference BVH files")
    evaluate.add_argument("--report", type=Path, required=True, help="Report JSON file")
    _with_config(evaluate, required=False)
    return parser


def _require_file(path: Path, what: str) -> None:
    if not path.is_file():
        raise FileNotFoundError(f"{what} {path} does not exist")


def _require_dir(path: Path, what: str) -> None:
    if not path.is_dir():
        raise FileNotFoundError(f"{what} {path} is not a directory")


def _require_parent(path: Path) -> None:
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise FileNotFoundError(f"Output directory {parent} does not exist")


def validate_arguments(args: argparse.Namespace) -> None:
    """Check inputs and flag values before anything is computed or written.

    Raises
    ------
    FileNotFoundError
        Missing input file or output directory
    ValueError
        Invalid flag value
    """
    if args.command == "preprocess":
        if args.bvh_dir is not None:
            _require_dir(args.bvh_dir, "BVH directory")
        if args.out.exists() and not args.out.is_dir():
            raise FileExistsError(f"Output {args.out} exists and is not a directory")
    elif args.command == "train":
        _require_dir(args.data, "Dataset directory")
        _require_parent(args.out)
    elif args.command in ("sample", "compose"):
        _require_file(args.model, "Checkpoint")
        _require_parent(args.out)
        if args.out.suffix.lower() != ".bvh":
            raise ValueError(f"Output {args.out} must be a .bvh file")
        if args.command == "sample":
            if args.frames < 2:
                raise ValueError(f"--frames must be >= 2, got {args.frames}")
            if not math.isfinite(args.gamma):
                raise ValueError("--gamma must be finite")
            if args.audio is not None:
                _require_file(args.audio, "Audio file")
        else:
            _require_file(args.script, "Prompt script")
    elif args.command == "eval":
        _require_dir(args.generated, "Generated directory")
        _require_dir(args.reference, "Reference directory")
        _require_parent(args.report)
    if getattr(args, "config", None) is not None:
        _require_file(args.config, "Configuration file")


def _load_config(args: argparse.Namespace) -> EngineConfig:
    if getattr(args, "config", None) is None:
        return apply_overrides(EngineConfig(), getattr(args, "override", None))
    return load_config(args.config, args.override)


def _execute(args: argparse.Namespace) -> None:
    level = getattr(logging, args.log_level)
    if args.command in ("sample", "compose"):
        control = EngineControl(console_log_level=level, log_file=args.log_file)
        checkpoint = control.load_model(args.model, args.override)
        if args.command == "sample":
            control.sample(checkpoint, args.out, args.frames, args.text, args.audio, args.gamma, args.seed)
        else:
            control.compose(checkpoint, args.script, args.out, args.seed)
        return

    control = EngineControl(_load_config(args), console_log_level=level, log_file=args.log_file)
    if args.command == "preprocess":
        control.preprocess(args.out, args.bvh_dir, args.seed)
    elif args.command == "train":
        control.train(args.data, args.out, args.seed, args.plot)
    elif args.command == "eval":
        control.evaluate(args.generated, args.reference, args.report)


def run(argv: Sequence[str] | None = None) -> int:
    """Run a command and return its exit code.

    Parameters
    ----------
    argv, optional
        Command line arguments without the program name, by default ``sys.argv[1:]``

    Returns
    -------
        0 success, 2 usage error, 3 validation error, 4 I/O error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        validate_arguments(args)
        _execute(args)
    except (ValueError, KeyError, ArithmeticError, yaml.YAMLError) as exc:
        log.error("Validation error: %s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    """Console script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
