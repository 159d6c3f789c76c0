"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`GphcsError`; the CLI maps the three families below onto exit codes.
"""


class GphcsError(Exception):
    """Base class for package errors."""


class DomainError(GphcsError, ValueError):
    """An argument lies outside the domain of the operation."""


class ContractError(GphcsError, ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class ParseError(GphcsError, ValueError):
    """A data file could not be parsed.

    ``line`` and ``column`` are 1-based and point at the offending token.
    """

    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if line is not None:
            where = f" at line {line}, column {column}"
        if source:
            where = f" in {source}{where}"
        super().__init__(f"{message}{where}")


class NumericalError(GphcsError, ArithmeticError):
    """Base class for failures of an iterative or numerical procedure."""


class InsufficientInformationError(NumericalError):
    """The sample cannot identify both Weibull parameters."""


class NoRootError(NumericalError):
    """No sign change of the profiled score was found."""


class NonConvergenceError(NumericalError):
    def __init__(self, message, last_iterate=None):
        self.last_iterate = last_iterate
        super().__init__(message)


class UnstableCovarianceError(NumericalError):
    """Observed information is not positive definite."""


class InvalidProposalScaleError(NumericalError):
    """Metropolis proposal standard deviation is not strictly positive."""


class CellError(GphcsError):
    """A simulation cell exceeded its failed-fit budget."""

    def __init__(self, message, cell_name=None):
        self.cell_name = cell_name
        super().__init__(message)
