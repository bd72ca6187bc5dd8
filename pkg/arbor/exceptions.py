"""
Custom exceptions for the arbor package.
"""


class ArborError(Exception):
    """Base exception for arbor errors."""
    pass


class InvalidSizeError(ArborError):
    """Raised when a tree size is outside an operation's domain (e.g. n = 0)."""
    pass


class InvalidTreeError(ArborError):
    """Raised when a parent array or edge list does not describe a tree."""
    pass


class LabelError(ArborError):
    """Raised for out-of-range labels or mismatched label sets."""
    pass


class ConvergenceError(ArborError):
    """Raised when the eigensolver does not converge."""
    
    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual

    def __reduce__(self):
        return self.__class__, (self.args[0], self.iterations, self.residual)


class RiskError(ArborError):
    """Raised for invalid risk parameters or degenerate regression input."""
    pass


class OracleError(ArborError):
    """Raised when an exact computation is out of range or unsupported."""
    pass


class ConfigError(ArborError):
    """Raised when an experiment configuration is malformed."""
    pass


class ExperimentError(ArborError):
    """Raised when a simulation cell fails; ``cell`` names the failing cell."""
    
    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell

    def __reduce__(self):
        return self.__class__, (self.args[0], self.cell)
