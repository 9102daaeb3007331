"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid run configuration (unknown key, bad value, inconsistent sizes)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: non-convergence, undershoot, non-finite data."""
