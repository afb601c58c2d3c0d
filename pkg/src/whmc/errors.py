"""Exception types shared across the package."""


class WhmcError(Exception):
    """Base class for all package errors."""


class ParameterError(WhmcError, ValueError):
    """A model or operation parameter is outside its admissible range."""


class DomainError(WhmcError, ValueError):
    """An evaluation point is outside the domain (e.g. at or near a pole)."""


class NumericalError(WhmcError, RuntimeError):
    """A numerical procedure failed (e.g. no sign change in a root bracket)."""


class DataError(WhmcError, RuntimeError):
    """Simulated data violated a contract (e.g. a non-finite functional value)."""


class ContractError(WhmcError, ValueError):
    """Two components were combined with incompatible configurations."""


class ConfigError(WhmcError, ValueError):
    """A run configuration is invalid. Carries the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
