"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto its
stable contract: 2 for bad input, 3 for numerical failure, 4 for a refuted
classification.
"""


class QFlexError(Exception):
    exit_code = 3


class BothZero(QFlexError, ValueError):
    exit_code = 2


class DegenerateLeading(QFlexError):
    pass


class NoConvergence(QFlexError, ArithmeticError):
    pass


class DegenerateSystem(QFlexError):
    pass


class SingularPoint(QFlexError):
    pass


class DegenerateLine(QFlexError):
    pass


class WeightSumMismatch(QFlexError):
    pass


class CapExceeded(QFlexError):
    pass


class NotInvariant(QFlexError):
    pass


class InvarianceViolation(QFlexError):
    pass


class DegenerateParameters(QFlexError, ValueError):
    exit_code = 2


class NearBoundaryWarning(UserWarning):
    """Raised as a warning when P or Q sits just outside the zero band."""
