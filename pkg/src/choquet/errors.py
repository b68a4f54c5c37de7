"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input fails a structural or numerical precondition."""


class IterationLimitError(RuntimeError):
    """The simplex pivot budget was exhausted before reaching a verdict."""


class ConsistencyError(RuntimeError):
    """Two computation routes that must agree disagreed beyond tolerance.

    This signals a tolerance breach or an engine bug, never bad user input.
    """
