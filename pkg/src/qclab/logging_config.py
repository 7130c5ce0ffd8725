"""
Configure logging for qclab.

Log records go to stderr; stdout is reserved for reports.
"""

import logging
import sys

from rich.console import Console
from rich.logging import RichHandler

LOG_FORMAT = '%(name)s - %(levelname)s - %(message)s'


def configure_root_logger_without_timestamp(level=logging.INFO):
    """
    Configure the root logger to output logs without timestamps.
    This affects all loggers in the application.
    """
    # Reset root logger configuration
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))

    logging.root.addHandler(handler)
    logging.root.setLevel(level)

    return logging.root


def configure_logger_without_timestamp(logger_name, level=logging.INFO):
    """
    Configure a specific logger to output rich, timestamp-free logs on stderr.
    """
    logger = logging.getLogger(logger_name)

    # Remove existing handlers to avoid duplicate messages
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    handler = RichHandler(
        console=Console(stderr=True),
        show_time=False,
        show_path=False,
        rich_tracebacks=True,
        markup=True,
        enable_link_path=False,
    )
    handler.setFormatter(logging.Formatter(LOG_FORMAT))

    logger.addHandler(handler)
    logger.setLevel(level)

    # Prevent propagation to the root logger to avoid duplicate logs
    logger.propagate = False

    return logger
