"""Exception types shared across the package."""


class GridBetError(Exception):
    """Base class for errors raised by this package."""


class ParseError(GridBetError, ValueError):
    """A malformed input row.  Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class OrderingError(GridBetError, ValueError):
    """Timestamps are not strictly increasing."""


class InsufficientDataError(GridBetError, ValueError):
    """Fewer than two usable samples."""


class CapacityError(GridBetError, ValueError):
    """Requested size exceeds what the exact algorithm can handle."""


class PrudenceError(GridBetError, ArithmeticError):
    """A betting update would drive capital non-positive."""


class ConfigError(GridBetError, ValueError):
    """Invalid run configuration."""
