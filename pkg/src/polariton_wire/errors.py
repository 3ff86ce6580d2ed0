"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class PolaritonWireError(Exception):
    """Base class for all package errors."""


class DomainError(PolaritonWireError, ValueError):
    """Argument outside the physical domain of a formula."""


class ConfigError(PolaritonWireError, ValueError):
    """Invalid or inconsistent configuration.

    ``violations`` carries every problem found, not just the first.
    """

    def __init__(self, message, violations=None):
        self.violations = list(violations) if violations else [message]
        super().__init__(message if not violations else "; ".join(self.violations))


class EmptyModeSetError(ConfigError):
    pass


class IntegrityError(PolaritonWireError):
    """Input failed a structural check (e.g. a non-Hermitian Hamiltonian)."""


class NumericalError(PolaritonWireError, ArithmeticError):
    pass


class ObservableError(PolaritonWireError):
    """An observable is undefined for the given state."""


class ResourceGuardError(PolaritonWireError):
    pass
