"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` so the CLI can map
them to a single exit status.
"""


class QCavesError(Exception):
    """Base class for all package errors."""


class ConfigError(QCavesError, ValueError):
    """Invalid run configuration. ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class NumericalError(QCavesError, ArithmeticError):
    pass


class WindowTooSmall(NumericalError):
    pass


class PoleProximity(NumericalError):
    """Evaluation point is numerically a node of the wave function."""

    def __init__(self, z, t, amplitude):
        super().__init__(f"|Psi|={amplitude:.3e} at z={z}, t={t} is inside the pole floor")
        self.z = z
        self.t = t
        self.amplitude = amplitude


class ContourThroughPole(NumericalError):
    pass


class NonIntegerWinding(NumericalError):
    pass


class PoleAbort(NumericalError):
    pass


class StepLimit(NumericalError):
    pass


class GridMismatch(QCavesError, ValueError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class ConvergedToWrongKind(NumericalError):
    pass


class CurveLost(NumericalError):
    pass


class ThresholdOutOfRange(QCavesError, ValueError):
    pass


class CurveGap(QCavesError, ValueError):
    pass


class EmptyEnsemble(QCavesError, ValueError):
    pass


class AllocationTooLarge(QCavesError, MemoryError):
    pass
