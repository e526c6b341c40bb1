"""Exception hierarchy shared by the library and the command-line front end."""

from __future__ import annotations


class DsrgError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(DsrgError, ValueError):
    """Shapes do not conform, or a zero dimension was requested."""


class CapacityError(DsrgError):
    """A result would exceed the configured matrix capacity."""


class DivisibilityError(DsrgError, ValueError):
    """Row truncation was asked for a row count that does not divide evenly."""


class LayoutError(DsrgError, ValueError):
    """Block grid cells do not tile a rectangle."""


class LoopError(DsrgError, ValueError):
    """An adjacency matrix has a nonzero diagonal entry."""


class UnsupportedParametersError(DsrgError, ValueError):
    """Parameters outside what an operation supports (for example mu != t)."""


class SeedContractError(DsrgError, ValueError):
    """A seed triple (A1, B1, C1) violates one of the conditions it must meet.

    ``condition`` names the violated equation or structural rule.
    """

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        self.detail = detail
        msg = f"seed contract violated: {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class MatrixFormatError(DsrgError, ValueError):
    """A matrix file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
