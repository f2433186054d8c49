"""Exception types shared across the package."""


class ParseError(ValueError):
    """A file or text input does not conform to its format."""


class ValidationError(ValueError):
    """An object violates an invariant or a precondition of an operation."""


class CapExceededError(RuntimeError):
    """An input is larger than the configured cap for an exhaustive routine."""
