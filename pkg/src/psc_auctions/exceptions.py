"""Exception types raised across the package."""


class PSCError(Exception):
    """Base class for all package errors."""


class NumericError(PSCError):
    """A numerical kernel could not produce a trustworthy answer."""


class BracketFailure(NumericError):
    """No sign change was found while bracketing a monotone root."""


class NonFinite(NumericError):
    """An integrand or objective returned NaN or an infinity."""


class OutOfRange(NumericError, ValueError):
    """A query point lies outside the tabulated range."""


class NonTermination(NumericError):
    """A clock simulation ran past its price ceiling."""


class OracleUnavailable(PSCError):
    """The information model offers no way to evaluate a conditional expectation."""


class InadmissibleContract(PSCError, ValueError):
    """A sharing rule violates the admissibility properties."""


class ConfigError(PSCError):
    """An experiment configuration failed to parse or validate."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class EmptyInput(PSCError, ValueError):
    """Nothing to plot or summarise."""
