"""
Exception hierarchy for spherebits.
Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class SphereBitsError(Exception):
    """Base class for all library errors"""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidParameterError(SphereBitsError, ValueError):
    """A precondition of an operation was violated"""

    exit_code = 2


class DimensionMismatchError(InvalidParameterError):
    """Inputs live on spheres of different dimension"""


class ApproxFamilyTooLargeError(InvalidParameterError):
    """The approximating family would not fit in the configured pair budget"""


class DataFileError(SphereBitsError):
    """A point set, partition or report file could not be read or written"""

    exit_code = 3

    def __init__(self, detail: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{detail}")
        self.path = path
        self.line = line


class NumericalError(SphereBitsError):
    """Quadrature, root finding or line search failed to reach its tolerance"""

    exit_code = 4


def require(condition: bool, message: str) -> None:
    """Raise InvalidParameterError with message unless condition holds"""
    if not condition:
        raise InvalidParameterError(message)
