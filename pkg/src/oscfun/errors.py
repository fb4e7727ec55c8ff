"""Exception types shared across the package."""


class OscfunError(Exception):
    """Base class for every error raised by oscfun."""


class ConfigurationError(OscfunError, ValueError):
    """Invalid user-facing configuration (unknown names, bad parameters)."""


class ExprSyntaxError(OscfunError, ValueError):
    def __init__(self, offset, expected, text=""):
        self.offset = offset
        self.expected = expected
        self.text = text
        super().__init__(f"syntax error at byte offset {offset}: expected {expected}")


class UnknownIdentifierError(OscfunError, ValueError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at byte offset {offset}")


class ExprDomainError(OscfunError, ArithmeticError):
    """Expression evaluated outside its domain, e.g. ln of a negative number."""

    def __init__(self, operation, value):
        self.operation = operation
        self.value = value
        super().__init__(f"{operation} undefined at input value {value!r}")


class TruncationError(OscfunError, ValueError):
    def __init__(self, nmax, required):
        self.nmax = nmax
        self.required = required
        super().__init__(f"nmax={nmax} is below the truncation rule; need nmax >= {required}")


class SingularFrequencyError(OscfunError, ArithmeticError):
    def __init__(self, radius):
        self.radius = radius
        super().__init__(f"f'(r^2/2) vanishes at r={radius!r}; branch condition degenerates")


class NumericalError(OscfunError, ArithmeticError):
    """A computation produced a non-finite value."""
