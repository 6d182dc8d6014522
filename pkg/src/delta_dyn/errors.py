"""Exception types shared across the package."""


class DeltaDynError(Exception):
    """Base class for all errors raised by this package."""


class SpaceMismatchError(DeltaDynError):
    """A point or region does not belong to the space it was used with."""


class UnsupportedSpaceError(DeltaDynError):
    """The requested operation is undefined for this space (e.g. infinite diameter)."""


class UnsupportedSystemError(DeltaDynError):
    """The requested operation is undefined for this system kind."""


class ConfigError(DeltaDynError):
    """A checker configuration violates its invariants."""


class PreconditionError(DeltaDynError):
    """An operation's stated hypothesis does not hold for the given inputs."""


class DegenerateWindowError(PreconditionError):
    """Arc lengths too large: the shift-window complement would be empty."""


class CoefficientOverflowError(DeltaDynError):
    """Iteration produced coefficients beyond the magnitude cap."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"coefficient magnitude overflow at iterate step n={step}")


class WitnessUnavailableError(DeltaDynError):
    """The finite sample sets do not reach the requested region; refine the samples."""


class ScenarioError(DeltaDynError):
    """A scenario file failed to parse or validate."""
