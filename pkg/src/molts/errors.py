"""Exception hierarchy shared by all modules."""


class MoltsError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(MoltsError, ValueError):
    """Invalid configuration or construction parameters."""


class ArgumentError(MoltsError, ValueError):
    """An argument has the wrong shape, range, or contains non-finite values."""


class NumericalError(MoltsError, ArithmeticError):
    """A numerical routine failed (lost definiteness, iteration cap, ...)."""


class UnboundedError(NumericalError):
    """An LP objective is unbounded above."""


class InvariantViolation(MoltsError, AssertionError):
    """A runtime invariant check failed."""
