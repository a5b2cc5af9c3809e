"""Exception types shared across the engine."""


class SculptError(Exception):
    """Engine failure with a machine-readable code for API and CLI clients."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class IngestError(SculptError):
    """Raised for unreadable or malformed input files."""
