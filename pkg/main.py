#!/usr/bin/env python3
"""
Stylized Facts - Main Entry Point

This module serves as the main entry point for the stylized-facts command.
It configures logging and hands the command line to the CLI, which runs one
of its subcommands:
- analyze: per-stock fact battery and per-market summaries
- cluster: hierarchical clustering of markets by verdict vector
- plot-data: CSV series behind the usual figures
- report: plain-text tables of the market summaries
- simulate: seeded synthetic markets for demos and smoke tests
"""

import logging
import sys
from typing import Optional

from cli.app import EXIT_INTERNAL, StylizedFactsCLI


def setup_logging(level: str = "INFO", log_file: Optional[str] = None):
    """
    Configure logging for the application.

    Logs always go to the console; when a log file is configured they are
    written there as well.
    """
    # Configure logging format
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    handlers: list = [logging.StreamHandler(sys.stdout)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=log_format,
        handlers=handlers,
        force=True,
    )

    # Quiet the graph runtime
    logging.getLogger("langgraph").setLevel(logging.WARNING)


def main():
    """
    Run the command line and exit with its status code.

    0 success, 1 usage error, 2 input error, 3 internal numeric failure.
    """
    try:
        sys.exit(StylizedFactsCLI(configure_logging=setup_logging).run())

    except KeyboardInterrupt:
        logging.info("🛑 Received shutdown signal...")
        sys.exit(EXIT_INTERNAL)


if __name__ == "__main__":
    main()
