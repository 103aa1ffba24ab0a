class FactorGapError(Exception):
    """Base class for all errors raised by this package."""


class DimacsError(FactorGapError, ValueError):
    pass


class MalformedHeader(DimacsError):
    pass


class ClauseCountMismatch(DimacsError):
    pass


class VariableOutOfRange(DimacsError):
    pass


class WidthExceeded(DimacsError):
    pass


class EmptyFormula(FactorGapError, ValueError):
    pass


class LengthMismatch(FactorGapError, ValueError):
    pass


class InvalidInstance(FactorGapError, ValueError):
    pass


class CertificateInvalid(FactorGapError, ValueError):
    pass


class WidthTooSmall(FactorGapError, ValueError):
    pass


class BudgetExceeded(FactorGapError):
    """The statevector simulator would need more qubits than allowed."""


class AttemptsExhausted(FactorGapError):
    pass


class NotComposite(FactorGapError, ValueError):
    pass


class BudgetExhausted(FactorGapError):
    """An exact oracle hit its limit; the answer is unknown, not negative."""


class NotInS(FactorGapError, ValueError):
    pass
