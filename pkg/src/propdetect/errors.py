"""Error types surfaced to CLI/service users."""


class ToolkitError(Exception):
    """Base class for user-facing failures (bad input, bad config)."""


class DataFormatError(ToolkitError):
    """Structurally broken input file (bad JSON, wrong field types...)."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc += str(path)
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class ValidationError(ToolkitError):
    """Well-formed input violating a semantic contract (unknown label, duplicate id...)."""
