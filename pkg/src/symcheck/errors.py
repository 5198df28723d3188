"""Exception hierarchy."""


class SymcheckError(Exception):
    """Base class for all toolkit errors."""


class InvalidField(SymcheckError, ValueError):
    pass


class DenominatorDivisibleByPrime(SymcheckError, ArithmeticError):
    pass


class MixedExtension(SymcheckError, ValueError):
    pass


class IndexOutOfRange(SymcheckError, IndexError):
    pass


class GoldenFormatError(SymcheckError, ValueError):
    pass


class InvalidSpec(SymcheckError, ValueError):
    pass


class SignMismatch(SymcheckError, ValueError):
    pass


class DimensionTooSmall(SymcheckError, ValueError):
    pass


class NotSymmetric(SymcheckError, ValueError):
    pass


class NotScalarOnBlock(SymcheckError, ValueError):
    pass


class NotIrreducible(SymcheckError, ValueError):
    pass


class RegularElementNotFound(SymcheckError, RuntimeError):
    pass


class IrrationalBeyondQuadratic(SymcheckError, ArithmeticError):
    pass


class ConstructionInvalid(SymcheckError, RuntimeError):
    pass
