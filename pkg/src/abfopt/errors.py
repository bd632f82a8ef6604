"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A run, schedule or instance parameter is outside its admissible range."""


class DivergenceError(RuntimeError):
    """A solver produced a nonfinite iterate.

    Carries the iteration index, the offending norms, and the partial
    trajectory recorded up to the failure.
    """

    def __init__(self, message, iteration=None, norms=None, trajectory=None):
        super().__init__(message)
        self.iteration = iteration
        self.norms = norms or {}
        self.trajectory = trajectory


class CertificateError(RuntimeError):
    """A certificate quantity could not be evaluated (e.g. infinite g value)."""


class UnconvergedError(RuntimeError):
    """The reference solver exhausted its budget before reaching tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
