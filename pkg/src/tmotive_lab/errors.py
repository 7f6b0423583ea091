"""Exception hierarchy shared by all modules."""


class TMotiveError(Exception):
    """Base class for library errors."""


class TwistDepthExceeded(TMotiveError):
    """A negative Frobenius twist needs more roots of w than the field spec allows."""


class NonTwistable(TMotiveError):
    """A series exponent is not divisible by the required power of q."""


class DivisionByZeroWithinPrecision(TMotiveError, ZeroDivisionError):
    """The leading coefficient vanishes at the known precision."""


class InseparableRamification(TMotiveError):
    """Theta-derivatives are undefined because p divides the ramification index."""


class PrecisionExhausted(TMotiveError):
    """No digit survives the requested operation at the current precision."""


class PrecisionLoss(TMotiveError):
    """A determinant is not a unit at the working precision."""


class ConvergenceNotCertified(TMotiveError):
    """Term degrees did not fall below the cutoff within the available terms."""


class MismatchBeyondPrecision(TMotiveError):
    """Two computations of the same quantity disagree on certified digits."""


class NotRational(TMotiveError):
    """A Betti entry could not be recognised as an element of F_q(t)."""


class IntertwineFailed(TMotiveError):
    """An endomorphism matrix does not commute with the Frobenius matrix."""


class RankDefect(TMotiveError):
    """The prolonged system has an unexpected rank."""


class EliminationMismatch(TMotiveError):
    """The eliminated system and the d-matrix system span different row spaces."""


class ModuleParseError(TMotiveError):
    """Syntax or semantic error in a module definition file."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {message}" if line else message)
