"""Exception hierarchy shared across modules."""


class ThermoSteadyError(Exception):
    """Base class for package errors."""


class DomainError(ThermoSteadyError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(ThermoSteadyError, ValueError):
    """A composite object (field, level system, event, scenario) is malformed."""


class IntegrationError(ThermoSteadyError, RuntimeError):
    """Time integration could not proceed.

    Attributes
    ----------
    time : float
        Simulation time (s) at which integration stopped.
    node : str or None
        Name of the offending node or level, when one can be identified.
    """

    def __init__(self, message, time, node=None):
        super().__init__(message)
        self.time = float(time)
        self.node = node


class InsufficientEvidenceError(ThermoSteadyError, ValueError):
    """Not enough data to evaluate a criterion (distinct from failing it)."""


class InconclusiveError(InsufficientEvidenceError):
    """A system description carries no evidence channel at all."""
