"""
Storage Errors
"""


class ConfigError(ValueError):
    """Invalid configuration; key_path names the offending key (e.g. model.delta)."""

    def __init__(self, key_path: str, message: str) -> None:
        super().__init__(f"{key_path}: {message}" if key_path else message)
        self.key_path = key_path
        self.message = message


class CheckpointError(ValueError):
    """Unreadable, truncated or foreign checkpoint file."""


class DiagnosticsFormatError(ValueError):
    """Diagnostics CSV with an unknown header or malformed row."""
