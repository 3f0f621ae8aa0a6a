class CcmError(Exception):
    """Base class for errors raised by ccmnet."""


class DataError(CcmError, ValueError):
    """Input data is malformed or inconsistent (bad file, mismatched sizes)."""


class ConfigError(CcmError, ValueError):
    """A configuration value violates its documented constraints."""
