"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class CapacityError(RuntimeError):
    """A request exceeds a configured exactness cap (degree, order, size)."""


class SingularRecursionError(ArithmeticError):
    """A recursion would divide by zero for the requested index combination."""


class FactorizationError(RuntimeError):
    """Covariance factorization failed even after jitter escalation."""
