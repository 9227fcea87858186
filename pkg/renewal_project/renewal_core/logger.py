# Copyright 2020 BULL SAS All rights reserved
"""Handlers of the loguru logger for the command line application.

The library only emits records. The command line application calls
setup_logger once at start-up, which routes the records to stderr, stdout
being reserved for the result documents, and optionally to a rotated log
file. Settings are read from the RENEWAL_KIT_LOGGING_* environment
variables.
"""
import sys
from enum import Enum
from pathlib import Path
from typing import List, Optional

from loguru import logger
from pydantic import BaseSettings


class LoggingLevel(str, Enum):
    """Levels accepted for RENEWAL_KIT_LOGGING_LEVEL."""

    CRITICAL = "CRITICAL"
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"
    DEBUG = "DEBUG"


class LoggingSettings(BaseSettings):
    """Where and how the records of a run are written.

    Attributes:
        level (LoggingLevel): records below this level are dropped.
        format (str): the loguru format of a record.
        filepath (Path): an optional log file, written along with stderr.
        rotation (str): the loguru rotation of the log file.
        retention (str): how long rotated log files are kept.
    """

    level: LoggingLevel = LoggingLevel.INFO
    format: str = (
        "<green>{time:HH:mm:ss.SSS}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{line}</cyan> | "
        "<level>{message}</level>"
    )
    filepath: Optional[Path] = None
    rotation: str = "1 days"
    retention: str = "1 months"

    class Config:
        env_prefix = "renewal_kit_logging_"


def setup_logger(settings: Optional[LoggingSettings] = None) -> List[int]:
    """Replaces the handlers of the logger by the ones described in
    settings, read from the environment when not given.

    Returns:
        list of int: the identifiers of the installed handlers, the stderr
            one first.
    """
    if settings is None:
        settings = LoggingSettings()
    level = settings.level.value
    logger.remove()
    handlers = [
        logger.add(sys.stderr, level=level, format=settings.format,
                   backtrace=True)
    ]
    if settings.filepath:
        settings.filepath.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(
            logger.add(
                str(settings.filepath),
                level=level,
                format=settings.format,
                rotation=settings.rotation,
                retention=settings.retention,
                colorize=False,
            )
        )
    return handlers
