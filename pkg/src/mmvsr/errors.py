"""Exception hierarchy for domain errors.

Every error raised on a bad input, an exhausted search budget, or a numeric
breakdown derives from MMVError so the CLI can map it to exit code 1.
"""


class MMVError(Exception):
    """Base class for all domain errors."""

    code = "error"


class InvalidInputError(MMVError):
    """An argument violates a documented precondition."""

    code = "invalid-input"


class NumericError(MMVError):
    """A computation produced non-finite or non-positive-definite values."""

    code = "numeric"


class NetTooLargeError(MMVError):
    """A quantization net would exceed its configured point cap."""

    code = "net-too-large"


class BudgetError(MMVError):
    """A combinatorial search would exceed its configured test budget."""

    code = "budget"


class DecodeError(MMVError):
    """A decoder could not produce any candidate estimate."""

    code = "decode"
