"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid configuration value (bandwidth, trimming, kernel name, ...)."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation (e.g. non-finite)."""


class EstimationError(RuntimeError):
    """Estimation could not be carried out on the given data."""
