"""Exception hierarchy shared across the package."""


class CagroverError(Exception):
    """Base class for all package errors."""


class CapacityError(CagroverError, ValueError):
    """Requested register is larger than the simulator supports."""


class InfeasibleError(CagroverError, ValueError):
    """A constraint (or constraint system) admits no binary solution."""


class ContractError(CagroverError, ValueError):
    """An operation was called with inputs that break its contract."""


class DomainError(CagroverError, ValueError):
    """Arguments fall outside the domain where a bound is valid."""


class TranspileError(CagroverError, ValueError):
    """A gate cannot be lowered to the target basis."""


class InstanceFormatError(CagroverError, ValueError):
    """Malformed instance text. ``line`` is 1-based, or None when unknown."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
