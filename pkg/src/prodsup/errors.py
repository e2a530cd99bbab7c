"""Exception types raised across the package."""


class ConfigError(ValueError):
    """An input violates a named constraint.

    The ``constraint`` attribute carries a short machine-friendly tag such as
    ``"coherence-too-short"``.
    """

    def __init__(self, constraint, message):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


class DegeneratePilotError(ValueError):
    """Zero pilot power, so the normalized channel estimate is undefined."""


class DegenerateGeometryError(ValueError):
    """``T_d == 2 N_d``: the closed-form allocation divides by zero."""


class NumericFailure(ArithmeticError):
    """A Monte Carlo sample produced a non-finite value."""

    def __init__(self, index, value):
        super().__init__(f"non-finite value {value!r} at sample index {index}")
        self.index = index
        self.value = value
