"""
spherebits: one-bit sphere tessellations from jittered sampling.

Equal-area partitions, the sign-linear embedding and its wedge discrepancy,
Stolarsky-type exact L2 formulas, sup-discrepancy brackets, energy descent
and the explicit bounds that tie them together.
"""

from .errors import (
    ApproxFamilyTooLargeError,
    DataFileError,
    DimensionMismatchError,
    InvalidParameterError,
    NumericalError,
    SphereBitsError,
)
from .models import DiscrepancyReport, Family, Method, Mode, PointSetMeta
from .onebit import PointSet

__version__ = "0.1.0"

__all__ = [
    "ApproxFamilyTooLargeError",
    "DataFileError",
    "DimensionMismatchError",
    "DiscrepancyReport",
    "Family",
    "InvalidParameterError",
    "Method",
    "Mode",
    "NumericalError",
    "PointSet",
    "PointSetMeta",
    "SphereBitsError",
]
