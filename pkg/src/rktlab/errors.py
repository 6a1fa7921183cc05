"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


class EvaluationError(ArithmeticError):
    """An integrand or evaluator produced a non-finite value."""


class DegenerateSystemError(ValueError):
    """A linear system that must have full rank does not."""


class PrecisionError(ArithmeticError):
    """A computation could not reach its accuracy target."""


class PrecisionWarning(RuntimeWarning):
    """A result is reported at or beyond the resolution the grids support."""


class ConfigError(ValueError):
    """An experiment configuration failed schema validation."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
