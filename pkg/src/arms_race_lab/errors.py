"""Exception hierarchy.

Validation problems (bad inputs, bad scenario files) derive from
``ValidationError``; numerical failures derive from ``ComputationError``.
The CLI maps the two families to exit codes 1 and 2.
"""


class ArmsRaceError(Exception):
    pass


class ValidationError(ArmsRaceError, ValueError):
    pass


class DomainError(ValidationError):
    """An argument lies outside the domain of the function."""


class ComputationError(ArmsRaceError, ArithmeticError):
    pass


class SingularConfigurationError(ComputationError):
    """A ratio is undefined because the signal scale is zero."""


class CornerBranchError(ComputationError):
    """The defender's interior branch is inactive (the d >= 0 clamp binds)."""


class CornerEquilibriumError(ComputationError):
    pass


class FixedPointInconsistencyError(ComputationError):
    pass


class IntegrationFailure(ComputationError):
    def __init__(self, message, last_state):
        super().__init__(message)
        self.last_state = last_state


class DegenerateSensitivityError(ComputationError):
    pass
