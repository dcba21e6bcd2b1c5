"""Exception hierarchy. Every domain error carries a stable ``code`` used in CLI reports."""


class DtcalcError(Exception):
    code = "DomainError"


class ParseError(DtcalcError, ValueError):
    code = "ParseError"

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class SchemaError(DtcalcError, ValueError):
    code = "SchemaError"

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class ZeroDivision(DtcalcError, ZeroDivisionError):
    code = "DivisionByZero"


class WindowUnderflow(DtcalcError):
    code = "WindowUnderflow"


class SingularMatrix(DtcalcError):
    code = "SingularMatrix"


class NonTransverse(DtcalcError):
    code = "NonTransverse"


class NotLagrangian(DtcalcError):
    code = "NotLagrangian"


class NotSymplectic(DtcalcError):
    code = "NotSymplectic"


class Degenerate(DtcalcError):
    code = "Degenerate"


class NotQuasiUnipotent(DtcalcError):
    code = "NotQuasiUnipotent"


class NoAdmissibleLattice(DtcalcError):
    code = "NoAdmissibleLattice"


class NotIsolated(DtcalcError):
    code = "NotIsolated"


class NotSingular(DtcalcError):
    code = "NotSingular"


class NotQuasiHomogeneous(DtcalcError):
    code = "NotQuasiHomogeneous"


class SingularHessian(DtcalcError):
    code = "SingularHessian"


class EliminationFailed(DtcalcError):
    code = "EliminationFailed"


class DimensionMismatch(DtcalcError):
    code = "DimensionMismatch"


class NotExact(DtcalcError):
    code = "NotExact"


class CocycleError(DtcalcError):
    code = "NonComposable"


class UndecidableSign(DtcalcError):
    code = "UndecidableSign"
