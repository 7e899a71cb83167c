"""Exception hierarchy.

The CLI maps these onto exit codes: ``InputError`` -> 2, ``FocalPoint`` -> 3,
``NumericalError`` -> 4.
"""


class ShapeTestError(Exception):
    pass


class InputError(ShapeTestError, ValueError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InconsistentK(InputError):
    def __init__(self, expected, offenders):
        self.expected = expected
        self.offenders = list(offenders)
        super().__init__(
            f"configurations do not share k={expected}: " + ", ".join(self.offenders)
        )


class EmptyFile(InputError):
    pass


class DomainError(InputError):
    pass


class DescriptorMismatch(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotNormalized(InputError):
    pass


class NotOnManifold(InputError):
    pass


class DegenerateKAd(InputError):
    pass


class UnsupportedDescriptor(InputError):
    pass


class FocalPoint(ShapeTestError):
    """The projection onto the embedded manifold is not unique here."""


class NumericalError(ShapeTestError):
    pass


class NonConvergence(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass


class SingularAnticovariance(NumericalError):
    pass


class SingularCovariance(NumericalError):
    pass
