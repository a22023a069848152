"""Exceptions raised across widthkit."""


class WidthKitError(Exception):
    """Base class for every error widthkit raises on purpose."""


class BudgetExceeded(WidthKitError):
    def __init__(self, what: str, size: int, budget: int):
        super().__init__(f"{what}: size {size} exceeds budget {budget}")
        self.what = what
        self.size = size
        self.budget = budget

    def __reduce__(self):
        return BudgetExceeded, (self.what, self.size, self.budget)


class DimensionMismatch(WidthKitError):
    pass


class FieldMismatch(WidthKitError):
    pass


class UnknownLabel(WidthKitError, KeyError):
    def __str__(self):
        return f"unknown label(s): {self.args[0]}"


class InvalidLayout(WidthKitError):
    pass


class InvalidProfile(WidthKitError):
    pass


class NotBijective(WidthKitError):
    pass


class InvalidMinor(WidthKitError):
    pass


class NotAnEdge(WidthKitError):
    pass


class InputFormatError(WidthKitError):
    """Malformed input file; carries the 1-based position of the problem."""

    def __init__(self, message: str, line: int, column: int = 1, source: str = "<input>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.source = source

    def __reduce__(self):
        return InputFormatError, (self.message, self.line, self.column, self.source)


class TheoremViolation(WidthKitError, AssertionError):
    """A guaranteed witness was not found or a checked identity failed."""
