"""
工具模块
"""

from rapid_apsp.utils.error_handling import (
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFICATION_FAILED,
    ArgumentError,
    CapacityError,
    ConfigurationError,
    ConsistencyError,
    ErrorTracker,
    GraphFormatError,
    ParseError,
    PreconditionError,
    RapidGraphError,
    SchemaError,
    StorageError,
    VertexRangeError,
    exit_code_for,
    global_error_tracker,
    handle_exceptions,
)
from rapid_apsp.utils.logging_setup import setup_logging

__all__ = [
    "EXIT_IO",
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_VERIFICATION_FAILED",
    "ArgumentError",
    "CapacityError",
    "ConfigurationError",
    "ConsistencyError",
    "ErrorTracker",
    "GraphFormatError",
    "ParseError",
    "PreconditionError",
    "RapidGraphError",
    "SchemaError",
    "StorageError",
    "VertexRangeError",
    "exit_code_for",
    "global_error_tracker",
    "handle_exceptions",
    "setup_logging",
]
