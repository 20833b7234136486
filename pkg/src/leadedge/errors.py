"""Exception types shared across the package."""


class LeadEdgeError(Exception):
    """Base class for all package errors."""


class ParameterError(LeadEdgeError, ValueError):
    """A model parameter is outside its admissible domain."""


class ProfileError(LeadEdgeError, ValueError):
    """A lateral-flow speed profile is invalid (non-positive, bad table, ...)."""


class ConfigError(LeadEdgeError, ValueError):
    """A run configuration is inconsistent or incomplete."""


class IntegrationError(LeadEdgeError, RuntimeError):
    """Time integration failed (CFL violation, repeated positivity clamps, ...)."""


class NumericalError(LeadEdgeError, RuntimeError):
    """A solver failed to converge or a bracket could not be established."""
