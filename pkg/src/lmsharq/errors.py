"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid configuration value or inconsistent parameter set."""


class DataError(ValueError):
    """Well-formed request over data that cannot support it."""
