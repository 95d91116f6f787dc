"""
Logging utilities for the qudit teleportation simulator
"""
import logging
import os
from logging.handlers import RotatingFileHandler
from typing import Optional

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logger(
    log_file: Optional[str] = None,
    log_level: str = "INFO",
    max_size_mb: int = 10,
    backup_count: int = 5,
    log_format: str = DEFAULT_FORMAT,
) -> None:
    """
    Set up the application logger

    Console output goes to stderr so that stdout only carries command results.

    Args:
        log_file: Path to the log file, or None for console logging only
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        max_size_mb: Rotation size of the log file
        backup_count: Number of rotated files to keep
        log_format: Format string shared by all handlers
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)

    # Remove existing handlers to avoid duplicate logs
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    formatter = logging.Formatter(log_format)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        log_dir = os.path.dirname(log_file)
        try:
            if log_dir and not os.path.exists(log_dir):
                os.makedirs(log_dir)
            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=max_size_mb * 1024 * 1024,
                backupCount=backup_count,
            )
            file_handler.setLevel(numeric_level)
            file_handler.setFormatter(formatter)
            root_logger.addHandler(file_handler)
        except Exception as e:
            logging.error(f"Failed to create file handler: {str(e)}")
            logging.warning("Continuing with console logging only")

    logging.debug(f"Logger initialized with level {log_level}")


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance for a specific module

    Args:
        name: Name of the module

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
