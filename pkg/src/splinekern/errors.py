"""Exception types raised by splinekern."""


class SplineKernError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(SplineKernError, ValueError):
    """An argument lies outside the supported domain."""


class UnsupportedConfigurationError(SplineKernError, ValueError):
    """The configuration is valid but not handled by the requested path
    (e.g. ``K`` not dividing ``N`` for Demmler-Reinsch constructions)."""


class DegenerateConfigurationError(SplineKernError, ArithmeticError):
    """Numerical degeneracy: roots on the unit circle, repeated roots,
    interpolating fits, empty interior intervals."""
