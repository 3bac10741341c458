"""Exception types raised across the package."""


class LFFError(ValueError):
    """Base class for every error raised by :mod:`lff`."""


class ParameterError(LFFError):
    """Operands built over different field parameters, or invalid parameters."""


class DomainError(LFFError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(LFFError):
    """A documented precondition (mean-zero input, index range, ...) failed."""


class ValidationError(LFFError):
    """A serialized document failed validation.

    ``field`` names the offending key.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
