"""Exception types shared across the package."""


class GebSafeError(Exception):
    """Base class for all package errors."""


class InvalidParams(GebSafeError, ValueError):
    pass


class NonHurwitz(GebSafeError):
    """The continuous thermal model has an eigenvalue with non-negative real part."""


class SingularA(GebSafeError):
    pass


class ZeroSlope(GebSafeError, ValueError):
    """Indoor temperature does not respond to cooling supply; no region can be inverted."""


class IndexOutOfRange(GebSafeError, IndexError):
    pass


class ProfileError(GebSafeError):
    pass


class SchemaMismatch(ProfileError):
    pass


class ParseError(ProfileError):
    def __init__(self, row: int, column: str, reason: str):
        self.row = row
        self.column = column
        self.reason = reason
        super().__init__(f"row {row}, column {column!r}: {reason}")


class ProfileTooShort(ProfileError):
    pass


class EpisodeFinished(GebSafeError, RuntimeError):
    pass


class DimensionMismatch(GebSafeError, ValueError):
    pass


class NonFiniteLoss(GebSafeError, FloatingPointError):
    """Raised when the TD loss diverges; carries a small diagnostic payload."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(GebSafeError, ValueError):
    pass
