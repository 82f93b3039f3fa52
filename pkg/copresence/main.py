import argparse
import sys
from typing import List, Optional

from copresence import __version__
from copresence.commands import COMMANDS
from copresence.errors import CopresenceError
from copresence.logger import init_logger
from copresence.utils.random import set_seeds

logger = init_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copresence",
        description="Multi-weather co-presence estimation with uncertainty.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.add_parser(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_seeds(0)
    try:
        return args.func(args)
    except CopresenceError as e:
        logger.error(f"{args.command} failed ({type(e).__name__}): {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
