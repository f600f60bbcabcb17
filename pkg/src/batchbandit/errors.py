"""Exception hierarchy.

Input problems derive from :class:`ValidationError` (a ``ValueError``);
numerical failures derive from :class:`NumericalError` (an
``ArithmeticError``). The CLI maps the two families to exit codes 2 and 3.
"""


class BatchBanditError(Exception):
    pass


class ValidationError(BatchBanditError, ValueError):
    pass


class LengthMismatchError(ValidationError):
    pass


class NonPositiveCountError(ValidationError):
    pass


class NonFiniteEntryError(ValidationError):
    pass


class MeanOutOfRangeError(ValidationError):
    pass


class TooFewArmsError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class WrongArityError(ValidationError):
    pass


class RankOutOfRangeError(ValidationError):
    pass


class EmptySubsetError(ValidationError):
    pass


class EnumerationTooLargeError(ValidationError):
    pass


class NumericalError(BatchBanditError, ArithmeticError):
    pass


class NonFiniteEvaluationError(NumericalError):
    pass


class NoSignChangeError(NumericalError):
    pass


class ToleranceNotMetError(NumericalError):
    pass


class NoValidDeltaError(NumericalError):
    pass
