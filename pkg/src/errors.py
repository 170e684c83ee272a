"""Exceptions raised by the certification library."""


class CertifyError(Exception):
    """Base class for every library error."""


class InvalidMatrix(CertifyError, ValueError):
    pass


class NotHermitian(CertifyError, ValueError):
    pass


class NoConvergence(CertifyError, ArithmeticError):
    pass


class NotOrthonormal(CertifyError, ValueError):
    pass


class DimensionMismatch(CertifyError, ValueError):
    pass


class NotMutuallyOrthogonal(CertifyError, ValueError):
    pass


class InvalidExponent(CertifyError, ValueError):
    pass


class UnsupportedModel(CertifyError, ValueError):
    pass


class NotNormalized(CertifyError, ValueError):
    pass


class DegenerateNorm(CertifyError, ArithmeticError):
    pass


class MatrixFileError(CertifyError, ValueError):
    """Matrix file is malformed or has an unknown version tag."""


class CountOverflow(CertifyError, ArithmeticError):
    """A truncation index is too large to represent."""
