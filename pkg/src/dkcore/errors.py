class DkcoreError(Exception):
    pass


class DomainError(DkcoreError, ValueError):
    """Argument outside the domain an operation is defined on."""


class ParseError(DkcoreError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ProtocolError(DkcoreError):
    """A message arrived over a channel the graph does not have."""


class InvariantViolation(DkcoreError, AssertionError):
    """A safety, monotonicity or bound property failed during a run."""
