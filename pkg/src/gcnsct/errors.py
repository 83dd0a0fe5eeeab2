"""Exception hierarchy shared across the package."""


class GcnSctError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(GcnSctError, ValueError):
    """Operands have incompatible dimensions."""


class InputError(GcnSctError, ValueError):
    """An input violates a documented precondition."""


class ConfigError(GcnSctError, ValueError):
    """A configuration value is out of its allowed range."""


class NumericalError(GcnSctError, ArithmeticError):
    """A quantity that must be nonnegative came out clearly negative."""


class TrainingError(GcnSctError, RuntimeError):
    """Training diverged or could not proceed."""
