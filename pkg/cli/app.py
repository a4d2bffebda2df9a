# Command-line surface: qwp wp|run|check|validate|example

import argparse
import logging
import sys
from typing import List, Optional

from cli.commands import (EXAMPLES, Verifier, render_report_text, render_triple_text,
                          render_tuple_text)
from config.settings import LOG_LEVEL, load_run_config
from quantum.protocol import ErrorBody, ObjectKind
from utils.errors import QwpError
from utils.helpers import dump_json, save_to_file, setup_logging

logger = logging.getLogger(__name__)

# Exit code when a validated object turns out invalid
EXIT_INVALID = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="truncation tolerance for loops and recursion (env QWP_TOL)")
    common.add_argument("--max-iter", type=int, help="iteration cap for loops and recursion")
    common.add_argument("--seed", type=int, help="seed for duality sampling")
    common.add_argument("--format", choices=["json", "text"], help="output format (default json)")
    common.add_argument("--config", help="YAML file with run configuration")
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs")

    parser = argparse.ArgumentParser(prog="qwp", description="Weakest-precondition verifier for quantum programs")
    commands = parser.add_subparsers(dest="command", required=True)

    wp = commands.add_parser("wp", parents=[common], help="weakest precondition of a postcondition")
    wp.add_argument("--program", required=True)
    wp.add_argument("--post", required=True)
    wp.add_argument("--observable", action="store_true", help="postcondition holds observables")

    run = commands.add_parser("run", parents=[common], help="run a program forward on a state")
    run.add_argument("--program", required=True)
    run.add_argument("--state", required=True)

    check = commands.add_parser("check", parents=[common], help="check a quantitative triple")
    check.add_argument("--program", required=True)
    check.add_argument("--post", required=True)
    check.add_argument("--state", required=True)
    check.add_argument("--threshold", type=float, required=True)
    check.add_argument("--observable", action="store_true", help="postcondition holds observables")

    validate = commands.add_parser("validate", parents=[common], help="validate an object file")
    validate.add_argument("path")
    validate.add_argument("--kind", required=True, choices=[k.value for k in ObjectKind])

    example = commands.add_parser("example", parents=[common], help="write canonical example files")
    example.add_argument("name", choices=EXAMPLES)
    example.add_argument("--out-dir", default=".")
    example.add_argument("--n", type=int, default=2, help="Grover register size")
    example.add_argument("--s", type=int, default=0, help="Grover marked state")
    example.add_argument("--register-size", type=int, default=1, help="coin input register size")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        save_to_file(text, out)
    else:
        sys.stdout.write(text)


def _log_level(verbose: int) -> str:
    if verbose >= 2:
        return "DEBUG"
    if verbose == 1:
        return "INFO"
    return LOG_LEVEL


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command; returns the process exit code.

    Errors print a JSON error body on stdout and exit with the code of their class.
    """
    args = build_parser().parse_args(argv)
    setup_logging(_log_level(args.verbose))
    logger.info("qwp %s started", args.command)
    try:
        config = load_run_config(
            args.config,
            truncation_tol=args.tol,
            max_iter=args.max_iter,
            seed=args.seed,
            output_format=args.format,
            observable=getattr(args, "observable", False) or None,
        )
        verifier = Verifier(config)
        text_mode = config.output_format == "text"
        exit_code = 0

        if args.command == "wp":
            result = verifier.cmd_wp(args.program, args.post)
            _emit(render_tuple_text(result) if text_mode else dump_json(result), args.out)
        elif args.command == "run":
            result = verifier.cmd_run(args.program, args.state)
            _emit(render_tuple_text(result) if text_mode else dump_json(result), args.out)
        elif args.command == "check":
            report = verifier.cmd_check(args.program, args.post, args.state, args.threshold)
            _emit(render_triple_text(report) if text_mode else dump_json(report.to_json_dict()), args.out)
        elif args.command == "validate":
            report = verifier.cmd_validate(args.path, ObjectKind(args.kind))
            _emit(render_report_text(report) if text_mode else dump_json(report.to_json_dict()), args.out)
            exit_code = 0 if report.valid else EXIT_INVALID
        else:
            result = verifier.cmd_example(args.name, out_dir=args.out_dir, n=args.n, s=args.s,
                                          register_size=args.register_size)
            _emit(dump_json(result), args.out)
    except QwpError as e:
        logger.error("%s: %s", type(e).__name__, e.message)
        sys.stdout.write(dump_json(ErrorBody.model_validate(e.to_dict()).to_json_dict()))
        return e.exit_code
    logger.info("qwp %s finished with exit code %d", args.command, exit_code)
    return exit_code
