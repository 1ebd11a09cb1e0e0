"""Schmidt-number witnesses from matching-outcome correlations in local bases."""

from .errors import WitnessError
from .qcore import Basis, BasisSet, DensityMatrix, MeasuredCounts, OverlapTable, make_basis, overlap_table
from .witness import WitnessReport, certify, loose_bounds, tight_bounds, witness_value

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "BasisSet",
    "DensityMatrix",
    "MeasuredCounts",
    "OverlapTable",
    "WitnessError",
    "WitnessReport",
    "certify",
    "loose_bounds",
    "make_basis",
    "overlap_table",
    "tight_bounds",
    "witness_value",
]
