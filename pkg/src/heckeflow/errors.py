"""Exception types raised across the package."""


class DomainError(ValueError):
    """Input lies outside the domain of the requested map or operation."""


class ClassificationError(DomainError):
    """A vector or point could not be assigned to a sector, branch or cell."""


class FixedPointError(DomainError):
    """The input is a fixed point for which the requested quantity is undefined."""


class ConsistencyError(RuntimeError):
    """An internal consistency check failed (image left its target set)."""


class BoundsExhausted(RuntimeError):
    """Orbit enumeration bounds were too small to certify an oracle answer.

    ``required`` carries the sup-norm bound that would have been sufficient,
    when it can be computed.
    """

    def __init__(self, message: str, required: float | None = None):
        super().__init__(message)
        self.required = required
