"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An input violates a documented precondition."""


class SingularityError(ArithmeticError):
    """A computation approached a parameterization singularity."""


class DegenerateGeometryError(ValueError):
    """Vector measurements do not determine a unique attitude."""
