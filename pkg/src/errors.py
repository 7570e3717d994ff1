"""Exception types shared across the package."""

from typing import Optional


class InvalidParameterError(ValueError):
    """A generator or experiment precondition was violated."""


class DuplicatePointError(ValueError):
    """Two input points have identical coordinates."""

    def __init__(self, i: int, j: int):
        super().__init__(f"points {i} and {j} are identical")
        self.pair = (i, j)


class DegenerateCloudError(ValueError):
    """The cloud does not span the dimension an operation requires."""

    def __init__(self, message: str, dimension: Optional[int] = None):
        super().__init__(message)
        self.dimension = dimension


class OracleLimitError(ValueError):
    """The brute-force oracle was asked for a cloud beyond its size guard."""


class BudgetExceededError(RuntimeError):
    """A run exceeded its wall-clock budget."""


class ConfigError(ValueError):
    """Malformed experiment configuration."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class CloudFormatError(OSError):
    """A point or mesh file could not be parsed."""
