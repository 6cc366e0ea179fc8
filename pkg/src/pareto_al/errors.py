"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ParetoALError(Exception):
    """Base class for all errors raised by :mod:`pareto_al`."""


class InvalidArgumentError(ParetoALError, ValueError):
    """An argument violates a documented precondition."""


class InsufficientDataError(ParetoALError, ValueError):
    """Too few rows to fit or evaluate."""


class DegenerateScopeError(ParetoALError, ValueError):
    """An error scope has no variance (or too few rows) on some output axis."""

    def __init__(self, message: str, axis: int | None = None):
        super().__init__(message)
        self.axis = axis


class ExhaustedPoolError(ParetoALError):
    """No unlabeled candidates remain."""


class CapacityError(ParetoALError):
    """Input exceeds what an exact (exponential-cost) routine accepts."""


class SchemaError(ParetoALError, ValueError):
    """A table or file is missing required columns or entries."""


class ParseError(ParetoALError, ValueError):
    """A cell could not be parsed; carries the row/column location."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyPoolError(ParetoALError, ValueError):
    """No usable rows remain after ingestion."""


class RunError(ParetoALError):
    """A single active-learning run failed; annotated with its seed and iteration."""

    def __init__(self, message: str, run_seed: int, iteration: int):
        super().__init__(f"{message} (run_seed={run_seed}, k={iteration})")
        self.run_seed = run_seed
        self.iteration = iteration
