"""Shared exception types.

The CLI maps these onto exit codes (see ``lcslab.cli``): BudgetError -> 3,
DataFormatError -> 4, ValueError -> 2.
"""


class BudgetError(RuntimeError):
    """A computation refused to start because it would exceed a resource budget."""


class DataFormatError(ValueError):
    """A persisted file failed validation while being parsed."""
