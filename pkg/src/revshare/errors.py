"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a model function."""


class ValidationError(ValueError):
    """A parameter set violates one of its invariants."""


class ConfigError(ValueError):
    """A scenario file could not be parsed or contains unknown keys."""


class SimulationError(RuntimeError):
    """An engine produced a non-finite state or rate."""
