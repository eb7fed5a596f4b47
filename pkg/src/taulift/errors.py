"""Exception hierarchy shared by every taulift module."""


class TauliftError(Exception):
    """Base class; ``invariant`` names the violated check for CLI reporting."""

    invariant = "taulift"


class ZeroInverse(TauliftError, ZeroDivisionError):
    invariant = "ZeroInverse"


class NonPositiveValuation(TauliftError, ValueError):
    invariant = "NonPositiveValuation"


class InvalidExponential(NonPositiveValuation):
    invariant = "InvalidExponential"


class ParityMismatch(TauliftError, ValueError):
    invariant = "ParityMismatch"


class WindowExhausted(TauliftError, ValueError):
    invariant = "WindowExhausted"


class MixedStatistics(TauliftError, ValueError):
    invariant = "MixedStatistics"


class UnbalancedCharge(TauliftError, ValueError):
    invariant = "UnbalancedCharge"


class SupportTooLarge(TauliftError, ValueError):
    invariant = "SupportTooLarge"


class NotAdmissible(TauliftError, ValueError):
    invariant = "NotAdmissible"


class BadNormalization(TauliftError, ValueError):
    invariant = "BadNormalization"


class SingularPivot(TauliftError, ArithmeticError):
    invariant = "SingularPivot"


class InconsistentData(TauliftError, ValueError):
    invariant = "InconsistentData"


class AntisymmetryViolated(InconsistentData):
    invariant = "AntisymmetryViolated"


class UnknownModel(TauliftError, KeyError):
    invariant = "UnknownModel"

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown model"


class BadParams(TauliftError, ValueError):
    invariant = "BadParams"


class NotAvailable(TauliftError, LookupError):
    invariant = "NotAvailable"
