"""
Exception hierarchy shared by the valuation, merger and CLI layers.

Every error names the condition that failed so the CLI can report it
verbatim and map it to an exit status.
"""
from typing import Optional


class ModelError(Exception):
    """Base class for all errors raised by the package"""
    exit_code = 1

    def __init__(self, message: str, condition: Optional[str] = None):
        super().__init__(message)
        self.condition = condition


class ValidationError(ModelError):
    """Malformed input: bad probabilities, ordering, counts, config values"""
    exit_code = 2


class UnknownCompanyError(ValidationError):
    def __init__(self, name: str, known: Optional[list] = None):
        known_str = ", ".join(sorted(known)) if known else "none"
        super().__init__(
            f"unknown company '{name}' (known companies: {known_str})",
            condition="unknown company name",
        )
        self.name = name


class UnsupportedInputError(ValidationError):
    """Input is well formed but the requested operation cannot use it"""


class DomainError(ModelError):
    """The model itself breaks down for these parameters (k <= g, delta <= 0)"""
    exit_code = 3


class BracketError(ModelError):
    """A bisection bracket does not enclose a sign change"""


class EmptyIntervalError(ModelError):
    """An endpoint of an empty interval was read"""
