"""Exception types raised across the package."""


class XiSpectraError(Exception):
    """Base class for all package errors."""


class PoleAtOne(XiSpectraError):
    pass


class RangeExceeded(XiSpectraError):
    pass


class NearZeroOfZeta(XiSpectraError):
    pass


class PoleAtNonPositiveInteger(XiSpectraError):
    pass


class StepTooCoarse(XiSpectraError):
    """A scan failed its completeness certificate; rescan with a finer step."""


class LostBracket(XiSpectraError):
    pass


class PathSingularity(XiSpectraError):
    pass


class SlowConvergence(XiSpectraError):
    pass


class DomainTooLow(XiSpectraError):
    pass


class EmptySample(XiSpectraError):
    pass


class UnsortedEdges(XiSpectraError):
    pass


class CapacityExceeded(XiSpectraError):
    pass


class TableTooShallow(XiSpectraError):
    pass


class TailTooLarge(XiSpectraError):
    pass


class ImaginaryResidue(XiSpectraError):
    pass


class InsufficientDecay(XiSpectraError):
    pass


class OutOfTableRange(XiSpectraError):
    pass


class MismatchedOmega(XiSpectraError):
    pass


class LoadError(XiSpectraError):
    """A persisted table or cache file is missing, corrupt or too loose."""
