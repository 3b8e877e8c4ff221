"""Exception hierarchy shared by all modules."""


class DermodError(Exception):
    """Base class for errors raised by this package."""


class ParseError(DermodError):
    """Malformed space, connection or rational input."""


class InvalidSpaceError(DermodError):
    """A semi-simplicial set fails its structural invariants."""


class NotAComplexError(DermodError):
    """Consecutive differentials do not compose to zero, or shapes mismatch."""


class InvalidPointError(DermodError):
    """A point violates an invertibility constraint or lies off pi_0."""


class NonFlatError(DermodError):
    """A connection fails the cocycle condition on some 2-simplex."""

    def __init__(self, message, simplex=None):
        super().__init__(message)
        self.simplex = simplex
