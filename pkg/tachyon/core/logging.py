import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from pythonjsonlogger import jsonlogger


class CustomJsonFormatter(jsonlogger.JsonFormatter):
    """Custom JSON formatter for structured logging"""

    def add_fields(self, log_record, record, message_dict):
        super(CustomJsonFormatter, self).add_fields(log_record, record, message_dict)
        log_record['timestamp'] = self.formatTime(record, self.datefmt)
        log_record['level'] = record.levelname
        log_record['logger'] = record.name
        log_record['module'] = record.module
        log_record['function'] = record.funcName
        log_record['line'] = record.lineno


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None, quiet: bool = False):
    """
    Configure package logging with console and rotating file handlers.

    Console output goes to stderr so that data written to stdout stays
    machine-readable. Calling this more than once replaces the handlers.
    """
    from tachyon.core.config import settings

    level_name = (level or ("DEBUG" if settings.DEBUG else settings.LOG_LEVEL)).upper()
    log_path = Path(log_file or settings.LOG_FILE)

    # Create logs directory
    log_path.parent.mkdir(parents=True, exist_ok=True)

    package_logger = logging.getLogger("tachyon")
    package_logger.setLevel(getattr(logging, level_name))
    package_logger.handlers.clear()
    package_logger.propagate = False

    json_formatter = CustomJsonFormatter(
        '%(timestamp)s %(level)s %(name)s %(message)s'
    )

    # Console Handler
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.WARNING if quiet else getattr(logging, level_name))
    if settings.LOG_JSON_CONSOLE:
        console_handler.setFormatter(json_formatter)
    else:
        console_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))

    # File Handler with JSON formatting
    file_handler = RotatingFileHandler(
        str(log_path),
        maxBytes=settings.LOG_MAX_BYTES,
        backupCount=settings.LOG_BACKUP_COUNT
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(json_formatter)

    # Error File Handler
    error_handler = RotatingFileHandler(
        str(log_path.parent / 'error.log'),
        maxBytes=settings.LOG_MAX_BYTES,
        backupCount=settings.LOG_BACKUP_COUNT
    )
    error_handler.setLevel(logging.ERROR)
    error_handler.setFormatter(json_formatter)

    package_logger.addHandler(console_handler)
    package_logger.addHandler(file_handler)
    package_logger.addHandler(error_handler)

    # joblib's worker chatter
    logging.getLogger("joblib").setLevel(logging.WARNING)
    return package_logger


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for a specific module"""
    return logging.getLogger(name)
