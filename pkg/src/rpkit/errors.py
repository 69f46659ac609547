"""Exception types shared across the package."""


class DomainError(ValueError):
    """A value lies outside the domain where an operation is defined.

    Raised for nonpositive radii, forcing evaluated where ``a*t + b <= 0``,
    violated parameter positivity, and similar conditions.
    """


class UnsupportedForcing(ValueError):
    """The forcing shape is not usable by the requested operation."""
