"""Error hierarchy shared by the library and the CLI.

Each error carries a short machine ``code`` and the CLI ``exit_code`` it maps
to. Metric undefinedness is not an error; see ``src.models.metrics``.
"""

from __future__ import annotations


class GparError(Exception):
    code = "data"
    exit_code = 2


class ParseError(GparError):
    code = "parse"

    def __init__(self, message: str, lineno: int | None = None) -> None:
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class NameClashError(ParseError):
    """A label is used both as a variable and as a term in one pattern."""


class ContractViolation(GparError):
    code = "contract"


class EmptyPatternError(ContractViolation):
    pass


class EmptyJoinError(ContractViolation):
    pass


class OpenConsequentError(ContractViolation):
    pass


class QueryError(ContractViolation):
    pass


class ExportError(GparError):
    code = "export"


class CapExceededError(GparError):
    code = "cap"
    exit_code = 3

    def __init__(self, required: int, cap: int) -> None:
        self.required = required
        self.cap = cap
        super().__init__(f"transaction database needs {required} rows, cap is {cap}")
