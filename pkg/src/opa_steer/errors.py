"""Exception types raised by the simulator."""


class OpaError(Exception):
    """Base class for all simulator errors."""


class DomainError(OpaError, ValueError):
    """An argument lies outside the domain of an analytic formula."""


class DegenerateSteeringError(DomainError):
    """Long-period quantities are undefined for broadside steering."""


class InfeasiblePerturbationError(OpaError, ValueError):
    """The requested amplitude perturbation would need a negative amplitude."""


class EmptyCutError(OpaError, ValueError):
    """A pattern cut has too few samples for lobe detection."""


class MissteerError(OpaError):
    """The global maximum of a cut lies outside the expected main-lobe window."""

    def __init__(self, message, peak_angle, peak_intensity, target):
        super().__init__(message)
        self.peak_angle = peak_angle
        self.peak_intensity = peak_intensity
        self.target = target


class ConfigError(OpaError, ValueError):
    """A run configuration could not be parsed or failed validation."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line

    def to_dict(self):
        return {
            "error": type(self).__name__,
            "message": str(self),
            "field": self.field,
            "line": self.line,
        }
