"""Exception types shared across the package."""


class QReadingError(Exception):
    """Base class for all package-specific errors."""


class StateValidationError(QReadingError):
    """A state object violates its physical invariants."""


class TruncationError(QReadingError):
    """Fock-space truncation loses more weight than the caller allows."""


class ConvergenceError(QReadingError):
    """A numerical routine failed its convergence check."""


class ConfigError(QReadingError):
    """Invalid command-line or config-file input."""
