"""Exception hierarchy shared by all modules."""


class PropintError(Exception):
    """Base class for every error raised by propint."""


class DomainError(PropintError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedRegimeError(DomainError):
    """The inputs are valid but the formula is undefined there."""


class UnknownMethodError(DomainError, KeyError):
    """An interval method identifier that is not registered."""

    def __str__(self) -> str:
        return Exception.__str__(self)


class SchemaError(PropintError, ValueError):
    """Input data does not have the expected shape."""


class RowError(SchemaError):
    """A single data row could not be parsed."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
