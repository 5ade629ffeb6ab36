"""Exception types shared across the package."""


class TableLengthError(ValueError):
    """An operation needs a longer coefficient table than was supplied."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class EigenspaceSeparationError(RuntimeError):
    """Eigenspaces could not be separated even after the fallback operator."""


class RouteDisagreementError(RuntimeError):
    """Independent computational routes disagree beyond the allowed spread.

    Carries every route's value so the caller can inspect the disagreement.
    """

    def __init__(self, message: str, values: dict):
        super().__init__(f"{message}: {values}")
        self.values = values


class CacheFormatError(ValueError):
    """An eigenvalue cache file has a wrong tag, header, or is damaged."""
