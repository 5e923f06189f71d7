"""
Exception handling for the command-line entry point.
Maps exceptions to exit codes and renders diagnostics on stderr.
"""

import sys
from typing import Any, Dict, TextIO

from pydantic import ValidationError

from recoupler.core.config import is_production
from recoupler.core.exceptions import DocumentError, RecouplerError, UsageError
from recoupler.utils.logger import cli_logger

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2


def create_error_response(exc: BaseException) -> Dict[str, Any]:
    """Build a diagnostic payload for an exception."""
    if isinstance(exc, DocumentError):
        error_type = "document_error"
    elif isinstance(exc, UsageError):
        error_type = "usage_error"
    elif isinstance(exc, RecouplerError):
        error_type = "input_error"
    elif isinstance(exc, ValidationError):
        error_type = "validation_error"
    elif isinstance(exc, OSError):
        error_type = "file_error"
    else:
        error_type = "internal_error"

    message = exc.message if isinstance(exc, RecouplerError) else str(exc)
    if isinstance(exc, ValidationError):
        message = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'request'}: {err['msg']}" for err in exc.errors()
        )

    response: Dict[str, Any] = {"error": {"type": error_type, "message": message}}

    # Add debug information outside production
    if not is_production():
        debug: Dict[str, Any] = {"exception_type": type(exc).__name__}
        if isinstance(exc, RecouplerError) and exc.details:
            debug["details"] = exc.details
        response["error"]["debug"] = debug

    return response


def format_diagnostic(response: Dict[str, Any]) -> str:
    error = response["error"]
    line = f"recoupler: {error['type'].replace('_', ' ')}: {error['message']}"
    debug = error.get("debug", {})
    if debug.get("details"):
        line += f" {debug['details']}"
    return line


def handle_exception(exc: BaseException, stream: TextIO = None) -> int:
    """Report ``exc`` and return the process exit code."""
    stream = stream or sys.stderr
    response = create_error_response(exc)

    if response["error"]["type"] == "internal_error":
        cli_logger.exception("Unexpected error", error_type=type(exc).__name__)
    else:
        cli_logger.error(
            "Command failed",
            error_type=type(exc).__name__,
            error_message=response["error"]["message"],
        )

    print(format_diagnostic(response), file=stream)
    return EXIT_INPUT_ERROR
