"""Exception hierarchy shared by the library and the command-line front end."""


class QcdistError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigurationError(QcdistError, ValueError):
    """A size guard or configuration value is out of range."""

    exit_code = 2


class UsageError(QcdistError, ValueError):
    """Arguments are inconsistent (length mismatch, repeated qubit, ...)."""

    exit_code = 2


class ParseError(QcdistError, ValueError):
    exit_code = 3


class NumericError(QcdistError, ArithmeticError):
    exit_code = 4


class SingularDesignError(NumericError):
    """The design matrix does not have full column rank."""


class DegenerateDenominatorError(NumericError):
    """A correlation was requested for a constant bit vector."""


class DomainError(NumericError):
    """A cost formula was evaluated outside the region where it is defined."""


class EmptyBudgetError(QcdistError):
    """The requested accuracy leaves no term of the digit expansion to estimate."""

    exit_code = 5


class LocalityError(QcdistError, RuntimeError):
    """A party tried to read data owned by the other party."""
