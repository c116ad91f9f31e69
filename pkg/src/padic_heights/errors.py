"""Exception hierarchy with machine-readable codes.

Every error raised by the library carries a ``code`` string and maps to a
process exit status used by the command-line front end.
"""


class HeightError(Exception):
    code = "ERROR"
    exit_status = 3

    def __init__(self, message, **detail):
        super().__init__(message)
        self.detail = detail


class ValidationError(HeightError):
    """Malformed input: bad job file, bad coordinates, wrong degree."""
    code = "VALIDATION"
    exit_status = 2


class PadicDomainError(HeightError):
    code = "DOMAIN"


class NonSquareError(PadicDomainError):
    code = "NON_SQUARE"


class BadReductionError(HeightError):
    code = "BAD_REDUCTION"


class SupportOverlapError(HeightError):
    code = "SUPPORT_OVERLAP"


class DiscMismatchError(HeightError):
    code = "DISC_MISMATCH"


class WeierstrassDiscError(HeightError):
    code = "WEIERSTRASS_DISC"


class LogTermRequired(HeightError):
    code = "LOG_TERM_REQUIRED"


class NonOrdinaryError(HeightError):
    code = "NON_ORDINARY_W"


class PrecisionExhausted(HeightError):
    code = "PRECISION_EXHAUSTED"
    exit_status = 4
