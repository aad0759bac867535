"""
Centralized logging configuration for the CSSD solver, tools and CLI.

Console output always goes to stderr so that command results written to
stdout stay machine readable. Detailed file logs are written only when a log
directory is configured (``CSSD_LOG_DIR``).
"""

import os
import sys
import json
import logging
from datetime import datetime
from typing import Any, Dict, Optional

import structlog

from src.config.configurations import get_settings


class LoggerConfig:
    """Centralized logger configuration and management."""

    # Class-level storage for loggers
    _loggers: Dict[str, logging.Logger] = {}
    _structlog_configured = False
    # Timestamped subdirectory keeps the logs of separate runs apart
    _log_timestamp = datetime.now().strftime('%m_%d_%Y_%H_%M_%S')
    _logs_dir: Optional[str] = None

    @classmethod
    def logs_dir(cls) -> Optional[str]:
        """Resolve the log directory from the settings, or None when file logs are off."""
        if cls._logs_dir is None:
            base = get_settings().log_dir
            if base:
                cls._logs_dir = os.path.join(base, cls._log_timestamp)
        return cls._logs_dir

    @classmethod
    def setup_logger(
        cls,
        name: str,
        enable_console: bool = True,
        enable_file: bool = True,
        log_level: Optional[int] = None,
    ) -> logging.Logger:
        """
        Setup and configure a logger with console and optional file handlers.

        Args:
            name: Logger name (typically a component name)
            enable_console: Whether to log to stderr
            enable_file: Whether to write a detailed log file (needs CSSD_LOG_DIR)
            log_level: Logging level (default: from settings)

        Returns:
            Configured logger instance
        """
        if name in cls._loggers:
            return cls._loggers[name]

        level = log_level if log_level is not None else get_settings().log_level_value

        logger = logging.getLogger(name)
        logger.setLevel(level)

        for handler in logger.handlers[:]:
            logger.removeHandler(handler)
        logger.propagate = False

        detailed_formatter = logging.Formatter(
            "[%(asctime)s]: %(levelname)s -['filename']:%(filename)s -['function_name']:%(funcName)s -['line_no']:%(lineno)d - %(message)s "
        )
        simple_formatter = logging.Formatter(
            "[%(asctime)s]: %(levelname)s - %(message)s "
        )

        if enable_console:
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(level)
            console_handler.setFormatter(simple_formatter)
            logger.addHandler(console_handler)

        logs_dir = cls.logs_dir()
        if enable_file and logs_dir:
            os.makedirs(logs_dir, exist_ok=True)
            file_handler = logging.FileHandler(
                os.path.join(logs_dir, f'{name.lower()}_detailed.log'),
                encoding='utf-8'
            )
            file_handler.setLevel(level)
            file_handler.setFormatter(detailed_formatter)
            logger.addHandler(file_handler)

        cls._loggers[name] = logger
        logger.debug(f"Logger initialized: {name}")
        return logger

    @classmethod
    def configure_structlog(cls) -> None:
        """
        Route structlog events through the stdlib loggers configured here.

        Library modules log with ``structlog.get_logger(<component>)``; after
        this call their events reach the same handlers as the CLI logger.
        """
        if cls._structlog_configured:
            return
        structlog.configure(
            processors=[
                structlog.stdlib.filter_by_level,
                structlog.stdlib.add_log_level,
                structlog.processors.KeyValueRenderer(key_order=["event"], sort_keys=True),
            ],
            logger_factory=_RegisteredLoggerFactory(),
            wrapper_class=structlog.stdlib.BoundLogger,
            cache_logger_on_first_use=False,
        )
        cls._structlog_configured = True

    @classmethod
    def log_run_summary(cls, summary: Dict[str, Any], run_id: str) -> Optional[str]:
        """
        Write the summary of one CLI run to a separate file.

        Args:
            summary: JSON-serializable run summary (command, params, objective, ...)
            run_id: Identifier used in the file name

        Returns:
            Path of the written file, or None when file logging is disabled
        """
        logs_dir = cls.logs_dir()
        if not logs_dir:
            return None
        os.makedirs(logs_dir, exist_ok=True)
        summary_file = os.path.join(logs_dir, f"run_summary_{run_id}.log")
        with open(summary_file, 'w', encoding='utf-8') as f:
            f.write(f"RUN SUMMARY\n")
            f.write(f"Run ID: {run_id}\n")
            f.write(f"Timestamp: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
            f.write(f"{'=' * 80}\n")
            f.write(json.dumps(summary, indent=2, sort_keys=True, default=str))
            f.write("\n")

        logger = cls._loggers.get('CssdCli')
        if logger:
            logger.info(f"Run summary logged to: {summary_file}")
        return summary_file

    @classmethod
    def get_logger(cls, name: str) -> Optional[logging.Logger]:
        """Get an existing logger by name."""
        return cls._loggers.get(name)

    @classmethod
    def reset(cls) -> None:
        """Forget all configured loggers and the resolved log directory."""
        for logger in cls._loggers.values():
            for handler in logger.handlers[:]:
                handler.close()
                logger.removeHandler(handler)
        cls._loggers.clear()
        cls._logs_dir = None


class _RegisteredLoggerFactory:
    """structlog logger factory handing out ``LoggerConfig`` loggers."""

    def __call__(self, *args: Any) -> logging.Logger:
        name = args[0] if args else "Cssd"
        return LoggerConfig.setup_logger(name=f"Tool_{name}")


def get_cli_logger() -> logging.Logger:
    """Convenience function to get the pre-configured command-line logger."""
    LoggerConfig.configure_structlog()
    return LoggerConfig.setup_logger(name='CssdCli')


def get_tool_logger(tool_name: str) -> structlog.stdlib.BoundLogger:
    """
    Convenience function to get a structlog logger for a numerical tool.

    Args:
        tool_name: Component name, e.g. "EnergyEngine"

    Returns:
        Bound structlog logger writing through the configured handlers
    """
    LoggerConfig.configure_structlog()
    return structlog.get_logger(tool_name)
