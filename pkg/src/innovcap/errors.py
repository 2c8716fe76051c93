"""Exception hierarchy shared by every module."""


class InnovcapError(Exception):
    """Base class for all package errors."""


class InvalidInput(InnovcapError, ValueError):
    pass


class NotPSD(InnovcapError, ValueError):
    """Matrix is significantly indefinite."""


class UnstableSystem(InnovcapError, ValueError):
    """Drift matrix is not Hurwitz."""


class NoConvergence(InnovcapError, RuntimeError):
    pass


class DivergedTrajectory(InnovcapError, RuntimeError):
    """Simulated state escaped the single-well regime."""


class InvalidTask(InnovcapError, ValueError):
    pass


class InsufficientData(InnovcapError, ValueError):
    pass


class PreconditionFailed(InnovcapError, ValueError):
    pass


class MaxSamplesExceeded(InnovcapError, RuntimeError):
    pass
