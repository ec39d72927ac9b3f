"""Exception hierarchy shared by every module in the package."""


class PosMapError(Exception):
    """Base class for all errors raised by :mod:`posmap`."""


class NonHermitianInput(PosMapError, ValueError):
    pass


class DimensionMismatch(PosMapError, ValueError):
    pass


class ParameterOutOfRange(PosMapError, ValueError):
    pass


class InvalidU(ParameterOutOfRange):
    """Breuer-Hall matrix is not antisymmetric or not a contraction."""


class InvalidState(PosMapError, ValueError):
    pass


class InsufficientMoments(PosMapError, ValueError):
    pass


class NumericalFailure(PosMapError, ArithmeticError):
    """Base for failures of a numerical pipeline on otherwise valid input."""


class DegenerateNormalization(NumericalFailure):
    pass


class DegenerateTA(NumericalFailure):
    pass


class NoSignChange(NumericalFailure):
    pass
