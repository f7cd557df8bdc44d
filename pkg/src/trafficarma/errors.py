"""Exception hierarchy.

Errors fall in two families so the command line can map them to exit
codes: :class:`InputError` (bad or insufficient input, exit 1) and
:class:`NumericError` (estimation failures, exit 2).
"""


class TrafficError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class InputError(TrafficError, ValueError):
    exit_code = 1


class NumericError(TrafficError, ArithmeticError):
    exit_code = 2

    #: origin index of the backtest round that failed, when applicable
    origin = None


class MalformedRow(InputError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        msg = f"malformed row at line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class EmptyInput(InputError):
    pass


class NonMonotonicPart(InputError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"capture part {index} is not time-ordered")


class TooShort(InputError):
    pass


class LengthMismatch(InputError):
    pass


class EmptyOrders(InputError):
    pass


class EmptyResults(InputError):
    pass


class ParameterError(InputError):
    pass


class ZeroVariance(NumericError):
    pass


class SingularDesign(NumericError):
    pass
