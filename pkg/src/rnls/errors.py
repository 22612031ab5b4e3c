"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameter, grid, or config-file input."""


class SingularTimeError(ValueError):
    """Propagator evaluated at a harmonic-oscillator refocusing time."""


class ResourceLimitError(RuntimeError):
    """Dense (oracle-grade) routine invoked above its size cap."""


class FlowCollapseError(RuntimeError):
    """Imaginary-time flow collapsed (supercritical mass for this exponent)."""


class FlowConvergenceError(RuntimeError):
    """Imaginary-time flow failed to converge within max_iter."""


class BracketError(RuntimeError):
    """Threshold bisection bracket does not straddle the transition."""

    def __init__(self, message, runs=None):
        super().__init__(message)
        self.runs = runs or []


class DiagnosticsError(ValueError):
    """Diagnostics operation invoked on unsuitable data."""
