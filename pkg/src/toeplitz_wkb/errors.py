"""Exception types raised across the package."""


class ToeplitzWKBError(Exception):
    """Base class for library errors."""


class DegreeError(ToeplitzWKBError):
    """Degree budget too small for the requested order."""


class NonInvertibleGermError(ToeplitzWKBError):
    """A map or symbol that should be invertible at the origin is not."""


class NotAMinimumError(ToeplitzWKBError):
    """The symbol does not have a non-degenerate minimum at the origin."""


class ResonanceError(ToeplitzWKBError):
    """A linear system in a formal recursion is singular."""


class ShrinkDomainError(ToeplitzWKBError):
    """The phase is not admissible on the requested disk."""

    def __init__(self, message, largest_radius):
        super().__init__(message)
        self.largest_radius = largest_radius


class QuadratureAccuracyError(ToeplitzWKBError):
    """Node refinement did not reach the requested accuracy."""


class InsufficientDataError(ToeplitzWKBError):
    """Too few usable data points for a fit."""


class ConfigError(ToeplitzWKBError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
