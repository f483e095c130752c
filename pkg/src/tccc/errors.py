"""Exception taxonomy shared across the package."""


class TcccError(Exception):
    """Base class for all package errors."""


class InputError(TcccError):
    """Malformed user input (files, JSON, CLI arguments)."""


class UnsupportedConeError(TcccError):
    """Cone outside the supported regime (non-simplicial, non-smooth)."""


class IncompleteFanError(TcccError):
    """Fan fails completeness (dangling wall, uncovered direction)."""


class AmplenessRequiredError(TcccError):
    """Operation requires a strictly convex (ample) divisor."""


class RefinementRequiredError(TcccError):
    """Region is not aligned with the arrangement's hyperplanes."""


class OutOfDomainError(TcccError):
    """Query point lies outside the arrangement's bounding box."""


class AlignmentError(TcccError):
    """Fractional parts of two divisors do not align ray by ray."""


class PathConstructionError(TcccError):
    """No suitable ample multiple found when building a deformation path."""


class UnknownSuiteError(TcccError):
    """run_suite was asked for a suite name that does not exist."""
