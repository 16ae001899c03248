"""
Internal utilities
"""
from typing import Any, Type

import numpy as np
from numpy.typing import NDArray

from brachistochrone_tangle.exceptions import InvalidInputError, ValidationError


def validate_that(condition: bool, msg: str) -> None:
    """
    Validate that the given condition is true, raising a ValidationError with the given message if it is not.

    This is implemented to write concise validating assertions.

    :raises ValidationError: if the condition is false
    """
    if not condition:
        raise ValidationError(msg)


def require(
    condition: bool, msg: str, error: Type[InvalidInputError] = InvalidInputError
) -> None:
    """
    Like :func:`validate_that` but for operation preconditions.

    :raises InvalidInputError: if the condition is false
    """
    if not condition:
        raise error(msg)


def frozen_array(value: Any, dtype: Any = np.complex128) -> NDArray[Any]:
    """
    Copy the given value into a new numpy array that cannot be written to anymore.
    """
    result = np.array(value, dtype=dtype, copy=True)
    result.setflags(write=False)
    return result
