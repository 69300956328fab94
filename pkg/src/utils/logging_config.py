"""
Logging Configuration
Centralized logging setup for the command-line runs
"""
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional


FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def setup_logging(log_dir: Optional[Path] = None, log_level: str = 'INFO',
                  console_output: bool = True, run_name: str = 'smallfibers') -> Optional[Path]:
    """
    Setup logging configuration

    Args:
        log_dir: Directory for log files (None = no file logging)
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        console_output: Whether to output to the console (stderr, so JSON on stdout stays clean)
        run_name: Prefix of the log file name

    Returns:
        Path of the log file, if one was opened
    """
    logger = logging.getLogger()
    logger.setLevel(getattr(logging, log_level.upper()))

    # Clear existing handlers; closing a StreamHandler leaves its stream open
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(FORMAT, datefmt=DATE_FORMAT)

    if console_output:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, log_level.upper()))
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    log_file = None
    if log_dir:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)

        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        log_file = log_dir / f'{run_name}_{timestamp}.log'

        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)  # Always log everything to file
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        logger.info(f"Logging to file: {log_file}")

    return log_file

