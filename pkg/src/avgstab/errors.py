"""Exception hierarchy.

The three top-level families map onto the CLI exit codes: parse problems (4),
numerical failures (3) and a missing equilibrium at the origin (2).
"""


class StabError(Exception):
    """Base class for every error raised by avgstab."""


class ParseError(StabError):
    pass


class ExprSyntaxError(ParseError):
    """Malformed expression text.

    ``position`` is the 0-based character offset in the expression and
    ``expected`` the set of tokens that would have been accepted there.
    """

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = frozenset(expected)
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"{message} at position {position}" + (f" (expected one of: {exp})" if exp else ""))


class UnknownSymbol(ParseError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"unknown symbol {name!r}{where}")


class ArityError(ParseError):
    def __init__(self, func, expected, got):
        self.func = func
        super().__init__(f"{func}() takes {expected} argument(s), got {got}")


class DimensionMismatch(ParseError):
    pass


class InvalidSystem(ParseError):
    """The system is not finite on the probe neighbourhood of the origin."""


class NumericalError(StabError):
    pass


class DomainError(NumericalError):
    def __init__(self, message, subexpr=None):
        self.subexpr = subexpr
        super().__init__(f"{message}: {subexpr}" if subexpr is not None else message)


class NonFinite(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class NotCanonical(StabError):
    """Scalar functionals need ``f1 == x2`` exactly."""


class NotAnEquilibrium(StabError):
    pass


class AmbiguousNearBoundary(StabError):
    """T1 sits just outside the zero band; an epsilon sweep should decide."""

    def __init__(self, t1, epsilon, zero_tol):
        self.t1 = t1
        self.epsilon = epsilon
        self.zero_tol = zero_tol
        super().__init__(
            f"|T1|/eps^2 = {abs(t1) / epsilon**2:.3e} is within 10x of zero_tol={zero_tol:g}"
        )
