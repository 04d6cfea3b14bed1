"""Exception hierarchy shared by every module."""


class OsnError(Exception):
    """Base class for data and model errors (CLI exit code 2)."""


class ParseError(OsnError, ValueError):
    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class MonotonicityError(OsnError, ValueError):
    def __init__(self, message_id, age_hours):
        self.message_id = message_id
        self.age_hours = age_hours
        super().__init__(
            f"retweet count decreases for message {message_id!r} at age {age_hours:g} h"
        )


class DomainError(OsnError, ValueError):
    pass


class DegenerateDataError(OsnError, ValueError):
    pass


class InsufficientDataError(OsnError, ValueError):
    pass


class NumericalFailure(OsnError, ArithmeticError):
    def __init__(self, message, iteration):
        self.iteration = iteration
        super().__init__(f"iteration {iteration}: {message}")


class UnreachableTargetError(OsnError, ValueError):
    pass


class StoreVersionError(OsnError):
    pass
