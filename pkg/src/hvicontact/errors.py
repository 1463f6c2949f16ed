"""Exception types raised by the library."""


class ConfigurationError(ValueError):
    """Invalid boundary decomposition, parameters or configuration file."""


class GeometryError(ValueError):
    """Degenerate mesh entity."""


class SemicoercivityError(RuntimeError):
    """A rigid mode is left unpinned where a nonsingular block is required."""
