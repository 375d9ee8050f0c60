"""Exception types raised across the package."""


class DirectionFileError(ValueError):
    """A direction-number file line could not be parsed or failed validation."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class CapacityError(ValueError):
    """More Sobol dimensions (or symbols) requested than are available."""


class DegenerateInputError(ValueError):
    """Inputs carry no correlation information (constant or zero-norm vectors)."""


class EncodingError(ValueError):
    """Text could not be encoded with the given item memory."""


class TrainingError(ValueError):
    pass


class IncompatibleModelError(ValueError):
    """Model and item memory were built from different configurations."""
