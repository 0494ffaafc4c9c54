"""
Error hierarchy for ReflexKit.

Every error is a ValueError carrying a human-readable message; the CLI layer
prints the message and exits non-zero. Subclasses only exist so callers can
tell which layer refused the input.
"""

from typing import Optional


class ReflexKitError(ValueError):
    pass


class LinalgError(ReflexKitError):
    pass


class PolytopeError(ReflexKitError):
    pass


class FanError(ReflexKitError):
    pass


class ToricError(ReflexKitError):
    pass


class MirrorError(ReflexKitError):
    pass


class CacheError(ReflexKitError):
    pass


class ConfigError(ReflexKitError):
    pass


class PalpParseError(ReflexKitError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
