"""Exception hierarchy shared by all solver modules."""


class PostmanError(Exception):
    """Base class for every error raised by this package."""


class InputError(PostmanError, ValueError):
    """Malformed input: unknown vertices, self-loops, bad weights, bad files."""


class PreconditionError(PostmanError, ValueError):
    """An operation was called on input violating its documented precondition."""


class SizeLimitError(PreconditionError):
    """An exact exponential-time routine was asked to exceed its size guard."""


class InfeasibleError(PostmanError):
    """The instance admits no feasible solution."""
