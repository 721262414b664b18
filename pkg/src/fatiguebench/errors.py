"""Exception hierarchy. CLI exit codes key off the two base classes."""


class FatigueError(Exception):
    """Base class for all package errors."""


class DataError(FatigueError, ValueError):
    """Input data violates a contract (bad file, bad row, bad shape)."""

    def __init__(self, msg, index=None, line=None):
        super().__init__(msg)
        self.index = index
        self.line = line


class NonMonotoneTime(DataError):
    pass


class NonFiniteValue(DataError):
    pass


class OutOfGrid(DataError):
    pass


class DomainError(FatigueError, ValueError):
    """Numeric argument outside the domain of a formula."""


class DegenerateSignal(DomainError):
    """Spectral quantities undefined (zero variance or zero moments)."""
