# Exception hierarchy shared by the engine, the front end and the CLI
#
# Every error carries a stable machine code and the CLI exit code for its class.

from typing import Any, Dict, List, Optional


class QwpError(Exception):
    """Base class for all verifier errors."""
    code = "error"
    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_dict(self) -> Dict[str, Any]:
        """JSON error body written by the CLI."""
        return {
            "error": {
                "type": type(self).__name__,
                "code": self.code,
                "message": self.message,
                "exit_code": self.exit_code,
            }
        }


# Front end (exit 2)

class QplSyntaxError(QwpError):
    code = "syntax_error"
    exit_code = 2

    def __init__(self, message: str, line: int, col: int, expected: Optional[List[str]] = None):
        self.line = line
        self.col = col
        self.expected = list(expected or [])
        detail = f"{line}:{col}: {message}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail)

    def to_dict(self) -> Dict[str, Any]:
        body = super().to_dict()
        body["error"].update({"line": self.line, "col": self.col, "expected": self.expected})
        return body


class ScopeError(QwpError):
    code = "scope_error"
    exit_code = 2


class QplTypeError(QwpError):
    code = "type_error"
    exit_code = 2


class ElaborationError(QwpError):
    code = "elaboration_error"
    exit_code = 2


# Validation (exit 3)

class InvalidMatrix(QwpError, ValueError):
    code = "invalid_matrix"
    exit_code = 3


class DimensionMismatch(QwpError, ValueError):
    code = "dimension_mismatch"
    exit_code = 3


class NotSquare(QwpError, ValueError):
    code = "not_square"
    exit_code = 3


class NotHermitian(QwpError, ValueError):
    code = "not_hermitian"
    exit_code = 3


class NotUnitary(QwpError, ValueError):
    code = "not_unitary"
    exit_code = 3


class NotNormalized(QwpError, ValueError):
    code = "not_normalized"
    exit_code = 3


class SignatureMismatch(QwpError, ValueError):
    code = "signature_mismatch"
    exit_code = 3


class InvalidPredicate(QwpError, ValueError):
    code = "invalid_predicate"
    exit_code = 3


class InvalidState(QwpError, ValueError):
    code = "invalid_state"
    exit_code = 3


class InvalidChannel(QwpError, ValueError):
    code = "invalid_channel"
    exit_code = 3


class OutOfRange(QwpError, ValueError):
    code = "out_of_range"
    exit_code = 3


class InputFileError(QwpError):
    code = "input_file_error"
    exit_code = 3


class ConfigError(QwpError):
    code = "config_error"
    exit_code = 3


# Iteration (exit 4)

class NonConvergent(QwpError, ArithmeticError):
    code = "non_convergent"
    exit_code = 4


class NonMonotone(QwpError, ArithmeticError):
    code = "non_monotone"
    exit_code = 4


# Thresholds (exit 5)

class InvalidThreshold(QwpError, ValueError):
    code = "invalid_threshold"
    exit_code = 5
