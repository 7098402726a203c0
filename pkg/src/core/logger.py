"""
Centralized logging configuration for the D-module verification engine.
"""
import logging
import sys
from pathlib import Path

LOG_FORMAT = '[%(levelname)s] %(name)s - %(message)s'
LOG_DIR = Path('logs')
LOG_FILE_NAME = 'verification.log'

_file_logging = False


def _engine_loggers():
    for name, obj in logging.Logger.manager.loggerDict.items():
        if isinstance(obj, logging.Logger) and (name.startswith('src') or name == '__main__'):
            yield obj


def _file_handler(formatter: logging.Formatter) -> logging.FileHandler:
    LOG_DIR.mkdir(exist_ok=True)
    handler = logging.FileHandler(LOG_DIR / LOG_FILE_NAME, encoding='utf-8')
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(formatter)
    return handler


def enable_file_logging(enabled: bool = True) -> None:
    """
    Route every engine logger, existing or created afterwards, to logs/verification.log as well.

    Args:
        enabled: Whether to attach the file handler
    """
    global _file_logging
    _file_logging = enabled
    if not enabled:
        return
    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')
    for logger in _engine_loggers():
        if not any(isinstance(h, logging.FileHandler) for h in logger.handlers):
            logger.addHandler(_file_handler(formatter))


def setup_logger(name: str, level: int = logging.INFO, log_to_file: bool = False) -> logging.Logger:
    """
    Setup and configure a logger for the application.

    Args:
        name: Logger name (typically __name__ from calling module)
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_to_file: Whether to also log to file

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)
    logger.propagate = False

    if log_to_file or _file_logging:
        logger.addHandler(_file_handler(formatter))

    return logger


def get_logger(name: str, debug: bool = False) -> logging.Logger:
    """
    Get a configured logger instance.

    Args:
        name: Logger name
        debug: Enable debug level logging

    Returns:
        Logger instance
    """
    level = logging.DEBUG if debug else logging.INFO
    return setup_logger(name, level)


def set_level(level: int) -> None:
    """Change the level of every engine logger already created (used by --debug)."""
    for obj in _engine_loggers():
        obj.setLevel(level)
        for handler in obj.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)
