"""Exception types shared across the package."""

from __future__ import annotations


class ParameterError(ValueError):
    """A graph-family or run parameter is inconsistent or out of range."""


class SeedGraphFormatError(ValueError):
    """A seed-graph or degree file could not be parsed."""

    def __init__(self, path: str, line_no: int, message: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class InfeasibleTargetsError(RuntimeError):
    """Duplicate-edge rejection ran out of attempts.

    Raised when a node cannot be given the requested number of distinct
    targets, e.g. a tiny seed graph with ``no_parallel_edges`` enabled.
    """


class GenerationError(RuntimeError):
    """A batch failed during a driver run; the message names the batch."""
