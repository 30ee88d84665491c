"""Shared exception base so CLI and gateway can catch package errors in one place."""


class AntmonError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
