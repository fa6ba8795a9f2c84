"""Staged maturity assessment - command-line entry point."""
import argparse
import logging
import sys
from typing import List, Optional

from cli.commands import gap, psych, report, score, validate
from cli.models import CliConfig
from domain.errors import EXIT_SCHEMA, AssessmentError
from domain.models import OutputFormat

logger = logging.getLogger(__name__)

COMMANDS = [validate, score, psych, gap, report]


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    # stderr logging; stdout carries the rendered documents
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s | %(levelname)-8s | %(name)s - %(message)s",
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help='Model JSON path, or "bundled" (default; env MATURITY_MODEL_PATH)')
    common.add_argument("--format", choices=[f.value for f in OutputFormat], help="Output format")
    common.add_argument("--output", help="Write the document here instead of stdout")
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("--verbose", action="store_true", help="Debug logging")
    noise.add_argument("--quiet", action="store_true", help="Warnings and errors only")

    parser = argparse.ArgumentParser(
        prog="maturity",
        description="Staged maturity assessment for software product line organizations",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for command in COMMANDS:
        command.register(subparsers, [common])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        config = CliConfig.from_args(args)
        return args.handler(args, config)
    except AssessmentError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.error(f"{args.command} I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except Exception as e:
        logger.error(f"Unhandled error in {args.command}: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
