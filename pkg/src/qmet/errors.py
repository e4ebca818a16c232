"""Exception hierarchy shared by every module."""


class QmetError(Exception):
    """Base class for library errors."""


class OrderError(QmetError, ValueError):
    """A relation fails the poset axioms, or an element is unknown."""


class NotALatticeError(OrderError):
    pass


class CapExceededError(QmetError, RuntimeError):
    """A construction would exceed a configured size cap."""

    def __init__(self, what: str, limit: int, needed: int | None = None):
        self.what = what
        self.limit = limit
        self.needed = needed
        msg = f"{what}: cap {limit} exceeded"
        if needed is not None:
            msg += f" (needs {needed})"
        super().__init__(msg)


class HypothesisViolation(QmetError, ValueError):
    """A constructor precondition (commutativity, monotonicity, ...) does not hold."""


class RadiusError(QmetError, ValueError):
    """A radius is not way-below the unit, or a radius family is empty."""


class ArityError(QmetError, ValueError):
    pass


class UnknownSymbolError(QmetError, KeyError):
    pass
