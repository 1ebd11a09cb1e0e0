"""Exception types raised across the package.

Everything derives from :class:`WitnessError` (itself a ``ValueError``) so callers
can catch one type at the boundary; the CLI maps it to exit code 1.
"""


class WitnessError(ValueError):
    pass


# linear algebra / validation
class NotOrthonormal(WitnessError):
    pass


class NotUnitary(WitnessError):
    pass


class DimensionMismatch(WitnessError):
    pass


class DimensionTooLarge(WitnessError):
    pass


class InvalidDensityMatrix(WitnessError):
    pass


class NumericalInconsistency(WitnessError):
    pass


class IndexOutOfRange(WitnessError):
    pass


# basis families
class BadModulusParameter(WitnessError):
    pass


class NotOddPrime(WitnessError):
    pass


class BadSchmidtVector(WitnessError):
    pass


# number theory
class EvenModulus(WitnessError):
    pass


class NotCoprime(WitnessError):
    pass


class ParityViolation(WitnessError):
    pass


class ZeroProduct(WitnessError):
    pass


class RangeExceeded(WitnessError):
    pass


# witness / analysis
class EmptyCounts(WitnessError):
    pass


class InvalidOverlapSummary(WitnessError):
    pass


class TooManyBases(WitnessError):
    pass


class Infeasible(WitnessError):
    pass


class InfeasibleNoise(WitnessError):
    pass


class NonBracketed(WitnessError):
    pass


class ZeroDiagonal(WitnessError):
    pass


# io
class SchemaViolation(WitnessError):
    pass


class NegativeCount(SchemaViolation):
    pass


class IoFailure(WitnessError):
    pass


# command-line usage problems map to exit code 2, so they sit outside WitnessError
class UsageError(Exception):
    pass


class UnknownFlag(UsageError):
    pass


class MissingRequired(UsageError):
    pass
