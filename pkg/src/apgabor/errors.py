"""Exception types shared across the package."""


class ArgumentError(ValueError):
    """An argument is outside the domain of the operation."""


class UnsupportedWindowError(ValueError):
    """The window lacks a property (decay bound, summability) the operation needs."""


class PrecisionError(ArithmeticError):
    """A truncation certificate could not be established at the requested precision."""


class InvariantViolation(AssertionError):
    """A structural invariant (e.g. Hermitian symmetry) does not hold."""


class CaseViolation(ValueError):
    """A spectrum set does not satisfy the separation condition of the requested case.

    Attributes
    ----------
    pair : tuple of float
        The two offending frequencies.
    """

    def __init__(self, message, pair):
        super().__init__(message)
        self.pair = pair
