"""Exception types shared across the package."""


class InputError(ValueError):
    """Bad caller input: malformed matrix, invalid plane pair, broken precondition."""


class NumericalError(RuntimeError):
    """An iteration failed to converge or a residual exceeded its tolerance."""

    def __init__(self, message, residual=None, system=None):
        super().__init__(message)
        self.residual = residual
        self.system = system


class FieldError(InputError):
    """A flow field violated its contract (non-unit value, singular point)."""
