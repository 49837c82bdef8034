"""Exception hierarchy shared by every module.

Validation problems (bad inputs, violated preconditions) derive from
:class:`ValidationError`; failures of a numerical procedure on valid input
derive from :class:`NumericalError`. The command-line front end maps the two
families onto exit codes 1 and 2.
"""


class DressedFluorError(Exception):
    """Base class for all package errors."""


class ValidationError(DressedFluorError, ValueError):
    """An input violates a documented precondition."""


class DegenerateGeometryError(ValidationError):
    """Two emitters occupy the same position."""


class NumericalError(DressedFluorError, RuntimeError):
    """A numerical procedure failed on otherwise valid input."""


class NonUniqueSteadyStateError(NumericalError):
    """The Liouvillian null space has dimension larger than one."""


class NoEmissionError(NumericalError):
    """The field intensity vanishes, so g1 cannot be normalized."""


class PlateauNotReachedError(NumericalError):
    """The correlation trace ends before settling onto its plateau."""

    def __init__(self, message, required_length=None):
        super().__init__(message)
        self.required_length = required_length
