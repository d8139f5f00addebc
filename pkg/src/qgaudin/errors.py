"""Exception hierarchy shared by all modules."""


class GaudinError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GaudinError, ValueError):
    """An argument lies outside the domain of an operation."""


class PoleError(GaudinError, ZeroDivisionError):
    """Evaluation hit a pole of a coupling, weight function or kernel."""


class DimensionError(GaudinError, ValueError):
    """Operator shapes do not match, or a Hilbert space exceeds the cap."""


class UnsupportedFamilyError(GaudinError, ValueError):
    """The requested operation is not defined for this family."""


class DegenerateStateError(GaudinError):
    """A Bethe vector collapsed to (numerically) zero."""


class SimultaneousDiagonalizationError(GaudinError):
    """Joint eigenbasis could not be resolved for a commuting family."""
