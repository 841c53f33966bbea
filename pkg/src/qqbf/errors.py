"""Exception hierarchy. Each class carries a stable ``kind`` used in CLI error payloads."""


class QQBFError(Exception):
    kind = "error"


class DomainError(QQBFError, ValueError):
    """Input outside an operation's domain (bad degree, non-coprime pair, ...)."""

    kind = "domain"


class CapacityError(QQBFError):
    """No vector orthogonal to the symmetric span fits in the register."""

    kind = "capacity"


class CompatibilityError(QQBFError):
    kind = "incompatible"


class NumericError(QQBFError, ArithmeticError):
    kind = "numeric"


class VerificationError(QQBFError):
    kind = "verification"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
