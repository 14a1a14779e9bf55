"""Exception hierarchy shared by every module."""


class CohconcError(Exception):
    """Base class for library errors."""


class DimensionError(CohconcError, ValueError):
    pass


class ParameterError(CohconcError, ValueError):
    pass


class UnsupportedShapeError(CohconcError, ValueError):
    pass


class InvalidStateError(CohconcError, ValueError):
    """Raised when an input violates a state or operator invariant.

    ``violations`` holds the :class:`~cohconc.states.Violation` records that
    triggered it.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class InvariantError(CohconcError, AssertionError):
    """A computed quantity broke a relation that must hold by construction."""
