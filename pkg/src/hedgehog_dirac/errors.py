"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point outside the domain of a field or evaluator was requested."""


class PreconditionError(ValueError):
    """An analytic hypothesis required by a computation failed its numerical audit."""
