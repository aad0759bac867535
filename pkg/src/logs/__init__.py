"""
Centralized logging module for the CSSD tools.

This module provides unified logging configuration and utilities
for the solver, the numerical tools and the command line.
"""

from .logger_config import (
    LoggerConfig,
    get_cli_logger,
    get_tool_logger
)

__all__ = [
    'LoggerConfig',
    'get_cli_logger',
    'get_tool_logger'
]
