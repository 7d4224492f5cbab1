"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment configuration or precondition violation."""


class NumericalError(RuntimeError):
    """Numerical failure: non-convergence, drift, resonance, lost precision."""
