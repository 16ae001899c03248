"""
Exceptions that are raised at various parts of this library.
"""
from typing import Any


class BrachistochroneError(Exception):
    """
    A generic error that is raised when a computation of this library cannot be completed
    """

    def __init__(self, msg: str, *data: Any) -> None:
        super().__init__(msg, *data)


class InvalidInputError(BrachistochroneError, ValueError):
    """
    This error indicates that an operation was called with input that violates its preconditions
    """

    pass


class StateParseError(InvalidInputError):
    """
    A textual state description could not be parsed
    """

    def __init__(self, field: str, msg: str):
        super().__init__(f"cannot parse {field}: {msg}", field)
        self.field = field


class ConvergenceError(BrachistochroneError):
    """
    An iterative algorithm did not converge within its configured iteration cap
    """

    pass


class ConsistencyError(BrachistochroneError):
    """
    Two independently computed quantities which must agree did not.

    This signals a numerical bug and not a user error.
    """

    pass


class SampleError(BrachistochroneError):
    """
    Evaluating a single sample of a Monte Carlo campaign failed.

    The original error is available as ``__cause__``.
    """

    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"sample {index} failed: {cause}", index)
        self.index = index
        self.cause = cause

    def __reduce__(self) -> Any:
        # campaign shards raise this inside worker processes
        return type(self), (self.index, self.cause)


class ValidationError(AssertionError):
    """
    A validation failed
    """

    def __init__(self, msg: str):
        super().__init__(msg)
