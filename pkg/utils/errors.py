class BergmanError(Exception):
    """Base class of every failure the analyzer reports.

    `exit_code` is what `main.py` returns for an uncaught error of this type:
    1 for bad input, 2 for a failed validation, 3 for numerical trouble.
    """
    exit_code = 1


class InvalidParams(BergmanError):
    exit_code = 1


class UnsupportedDegree(BergmanError):
    exit_code = 1


class ZeroPolynomial(BergmanError):
    exit_code = 1


class ValidationFailed(BergmanError):
    exit_code = 2


class DegreeMismatch(BergmanError):
    exit_code = 2


class SizeMismatch(BergmanError):
    exit_code = 2


class PreconditionViolated(BergmanError):
    """lambda is on (or numerically indistinguishable from) the essential curve."""
    exit_code = 2


class NonConvergence(BergmanError):
    exit_code = 3


class CrossCheckMismatch(BergmanError):
    exit_code = 3


class Indeterminate(BergmanError):
    """The answer depends on digits double precision does not have."""
    exit_code = 3
