"""Exception types shared across the package.

Every error carries a short ``kind`` tag so the command line layer can
report it without knowing the concrete class.
"""


class LabError(Exception):
    kind = "ERROR"


class OverflowCap(LabError):
    """An enumeration or closure exceeded its configured cap."""

    kind = "OVERFLOW"


class BudgetExceeded(LabError):
    kind = "BUDGET_EXCEEDED"


class Unavoidable(LabError):
    kind = "UNAVOIDABLE"


class PreconditionFailed(LabError, ValueError):
    kind = "PRECONDITION_FAILED"


class CycleError(LabError, ValueError):
    kind = "CYCLE"


class NotInD(LabError, ValueError):
    kind = "NOT_IN_D"


class InvalidCondition(LabError, ValueError):
    """A partial map that is not injective on chains.

    ``pair`` holds two comparable nodes that received the same colour.
    """

    kind = "INVALID"

    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class NoSeparator(LabError, ValueError):
    kind = "NO_SEPARATOR"


class WitnessInvalid(LabError, ValueError):
    kind = "WITNESS_INVALID"


class SplittingDetected(LabError, ValueError):
    kind = "SPLITTING_DETECTED"


class EmptyRefinement(LabError):
    kind = "EMPTY"


class ParseError(LabError, ValueError):
    kind = "USAGE"
