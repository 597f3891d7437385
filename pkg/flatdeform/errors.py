"""Exception hierarchy shared by the library and the CLI.

Every error carries a human-readable ``detail`` and the process exit code the
CLI maps it to (0 success, 1 verification failed, 2 input error, 3 budget or
search exhausted).
"""


class DeformationError(Exception):
    exit_code = 2

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InputError(DeformationError):
    exit_code = 2


class ArithmeticInputError(InputError, ValueError):
    """Precondition violated by an exact-arithmetic operation."""


class PoleError(InputError):
    """Evaluation at a pole, or a pole where the method requires none."""


class ExpressionSyntaxError(InputError):
    def __init__(self, message: str, text: str, position: int, line: int = 1):
        self.text = text
        self.position = position
        self.line = line
        self.column = position + 1
        super().__init__(f"{message} at line {line}, column {self.column}: {text!r}")


class VerificationFailed(DeformationError):
    exit_code = 1

    def __init__(self, detail: str, witness=None):
        super().__init__(detail)
        self.witness = witness


class BudgetExhausted(DeformationError):
    exit_code = 3

    def __init__(self, detail: str, diagnostics: dict | None = None):
        super().__init__(detail)
        self.diagnostics = diagnostics or {}
