"""Exception types shared across the lab."""


class RobbaLabError(Exception):
    """Base class for all errors raised by this package."""


class RingMismatchError(RobbaLabError):
    """Operands live over different coefficient rings."""


class NonUnitError(RobbaLabError):
    """Inversion of a non-unit; carries the annihilator when known.

    Over the dual numbers the annihilator of a non-unit is a power of the
    maximal ideal; ``annihilator`` is a string like ``"(eps^1)"``.
    """

    def __init__(self, message, annihilator=None):
        super().__init__(message)
        self.annihilator = annihilator


class WindowOverflowError(RobbaLabError):
    """An operation needs coefficients outside the representable window."""


class PrecisionError(RobbaLabError):
    """Not enough certified digits (or certified window) to proceed."""


class PivotAmbiguityError(RobbaLabError):
    """A pivot decision in p-adic elimination is too close to call."""


class ConvergenceError(RobbaLabError):
    """A series did not converge at the configured truncation level."""


class CompatibilityViolation(RobbaLabError):
    """A pair (z1, z2) fails the Res/involution gluing condition."""

    def __init__(self, message, defect_valuation=None):
        super().__init__(message)
        self.defect_valuation = defect_valuation


class ModelError(RobbaLabError):
    """A finite model violates a structural identity it must satisfy."""
