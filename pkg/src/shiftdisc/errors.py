"""Exception hierarchy. Each class carries a machine-readable code and a CLI exit status."""

from __future__ import annotations


class ShiftDiscError(Exception):
    code = "error"
    exit_status = 1


class InvalidArgument(ShiftDiscError, ValueError):
    code = "invalid-argument"
    exit_status = 2


class RangeError(InvalidArgument):
    code = "range-error"


class NExceedsTowerBound(InvalidArgument):
    code = "n-exceeds-tower-bound"


class MalformedCode(InvalidArgument):
    code = "malformed-code"


class BudgetError(ShiftDiscError):
    code = "budget-error"
    exit_status = 3

    def __init__(self, what: str, count: int, budget: int):
        super().__init__(f"{what}: {count} items exceed budget {budget}")
        self.count = count
        self.budget = budget


class ConsistencyError(ShiftDiscError, AssertionError):
    """A built-in consistency check failed; indicates a bug, never bad input."""

    code = "internal-consistency"
    exit_status = 4
