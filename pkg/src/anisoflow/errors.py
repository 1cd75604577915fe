"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
AssumptionError -> 3, BlowUpError -> 4.
"""


class ConfigError(ValueError):
    """Malformed configuration: unknown key, bad value, missing section."""


class AssumptionError(ValueError):
    """A structural assumption failed validation (A1-A4 or the weighted
    boundary-curvature condition), so the requested computation is refused."""


class BlowUpError(RuntimeError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message: str, t: float = float("nan"), node=None):
        super().__init__(message)
        self.t = t
        self.node = node


class InvalidAnisotropyError(ValueError):
    """A surface-energy density violated positivity/homogeneity/convexity."""
