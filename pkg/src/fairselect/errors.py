"""Exception types shared across the package.

The CLI maps these onto process exit codes, so solver internals raise the
most specific type that applies rather than bare ValueError.
"""


class FairselectError(Exception):
    """Base class for package-specific failures."""


class InfeasibleError(FairselectError):
    """The input admits no complete assignment (exit code 2)."""


class ScenarioFormatError(FairselectError):
    """A scenario, matrix, or plan file violates its format (exit code 3)."""


class NonIntegralSolutionError(FairselectError):
    """An LP solution expected to be integral was not (exit code 4)."""

    def __init__(self, message: str, column: int | None = None, value: float | None = None):
        super().__init__(message)
        self.column = column
        self.value = value


class InvariantError(FairselectError):
    """An internal invariant failed; indicates a bug, not bad input (exit code 4)."""
