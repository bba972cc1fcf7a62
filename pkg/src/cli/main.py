# src/cli/main.py
import argparse
import logging
import sys
import time
from typing import List, Optional

from src.cli.model_file import load_model
from src.cli.runner import COMMANDS, RunOptions, run
from src.config import get_config
from src.errors import EngineError
from src.monitoring.logger import setup_logging, status, timing

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="courant",
        description="Exact checks for Courant algebroids, Dirac generating operators and Lie bialgebroids",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("model", help="Path to a model file")
    parser.add_argument("--machine-output", metavar="PATH", help="Write the JSON report to PATH")
    parser.add_argument("--seed", type=int, help="Seed for the randomized checks (env COURANT_SEED)")
    parser.add_argument("--max-degree", type=int, help="Degree of random polynomial sections")
    parser.add_argument("--left", help="Left symbol expression for star")
    parser.add_argument("--right", help="Right symbol expression for star")
    parser.add_argument("--operator", help="Operator expression for symbol")
    parser.add_argument("--config", metavar="YAML", help="YAML config file")
    parser.add_argument("--no-color", action="store_true", help="Plain console output")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING, ERROR or CRITICAL")
    return parser


def _config_from_args(args: argparse.Namespace) -> dict:
    overrides = {"sampling": {}, "logging": {}, "report": {}}
    if args.seed is not None:
        overrides["sampling"]["seed"] = args.seed
    if args.max_degree is not None:
        overrides["sampling"]["max_degree"] = args.max_degree
    if args.log_level:
        overrides["logging"]["level"] = args.log_level.upper()
    if args.no_color:
        overrides["report"]["color"] = False
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = get_config(args.config, _config_from_args(args))
    except (ValueError, OSError) as e:
        print(status(f"Invalid configuration: {e}", ok=False, color=False), file=sys.stderr)
        return 2
    color = config["report"]["color"] and sys.stdout.isatty()
    setup_logging(config["logging"]["level"], use_color=color)

    start_time = time.time()
    try:
        model = load_model(args.model)
        options = RunOptions(
            seed=config["sampling"]["seed"],
            max_degree=config["sampling"]["max_degree"],
            workers=config["checks"]["workers"],
            left=args.left,
            right=args.right,
            operator=args.operator,
        )
        report = run(args.command, model, options, model_path=args.model)
    except EngineError as e:
        print(status(f"{type(e).__name__}: {e}", ok=False, color=color), file=sys.stderr)
        return e.exit_code

    print(report.render_human(color=color))
    logger.info(timing(args.command, time.time() - start_time, color=False))
    if args.machine_output:
        with open(args.machine_output, "w", encoding="utf-8") as f:
            f.write(report.render_machine() + "\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
