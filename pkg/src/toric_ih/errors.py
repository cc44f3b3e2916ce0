"""Exception hierarchy shared by all modules."""


class ToricIHError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(ToricIHError, ValueError):
    pass


class NotSaturated(ToricIHError, ValueError):
    pass


class NotDescendable(ToricIHError, ValueError):
    pass


class _Lookup(ToricIHError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class UnknownCone(_Lookup):
    pass


class SupportTooDeep(ToricIHError, ValueError):
    pass


class PerversityUndefined(ToricIHError, ValueError):
    pass


class UnknownName(_Lookup):
    pass


class ParseError(ToricIHError, ValueError):
    """Malformed document; carries the 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(ToricIHError, ValueError):
    """A parsed fan violates one or more fan axioms."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid fan:\n  " + "\n  ".join(self.violations))
