#!/usr/bin/env python3
"""
Qudit Teleportation Simulator - Main Application Entry Point
"""
import logging
import sys
from typing import List, Optional

from cli.commands import COMMANDS, EXIT_CONFIG, EXIT_INVARIANT, EXIT_RANK, build_run_config
from cli.formatting import open_output
from cli.parser import build_parser
from utils.config import load_config, resolve_config_path
from utils.errors import ConfigError, InvariantViolation, RankDeficientError, TeleportationError
from utils.logger import setup_logger

logger = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse the command line, load configuration and run one command

    Returns:
        Process exit status: 0 ok, 2 usage or configuration error,
        3 rank-deficient resource, 4 invariant violation
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0

    try:
        config = load_config(resolve_config_path(args.config))
    except ConfigError as e:
        setup_logger(log_level="WARNING")
        logger.error(f"Error loading configuration: {str(e)}")
        return EXIT_CONFIG

    # Setup logging
    log_config = config.logging
    setup_logger(
        log_config.file_path,
        args.log_level or log_config.level,
        max_size_mb=log_config.max_size_mb,
        backup_count=log_config.backup_count,
        log_format=log_config.format,
    )

    try:
        run = build_run_config(args, config)
        with open_output(run.out) as stream:
            return COMMANDS[run.command](run, stream)
    except RankDeficientError as e:
        logger.error(f"Error running {args.command}: {str(e)}")
        return EXIT_RANK
    except InvariantViolation as e:
        logger.error(f"Invariant violated while running {args.command}: {str(e)}")
        return EXIT_INVARIANT
    except (ConfigError, TeleportationError) as e:
        logger.error(f"Error in {args.command} options: {str(e)}")
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Error writing output: {str(e)}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
