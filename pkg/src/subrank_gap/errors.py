"""Exception hierarchy shared by all modules."""


class SubrankGapError(Exception):
    """Base class for library errors."""


class FieldError(SubrankGapError):
    pass


class FieldMismatch(FieldError):
    pass


class ShapeMismatch(SubrankGapError):
    pass


class Singular(SubrankGapError):
    pass


class EmptySpace(SubrankGapError):
    pass


class ZeroTensor(SubrankGapError):
    pass


class GenericityFailure(SubrankGapError):
    """Random sampling did not hit the Zariski-open set within the retry budget."""


class PreconditionFailed(SubrankGapError):
    pass


class UnclassifiableOverSmallField(SubrankGapError):
    pass


class InternalContradiction(SubrankGapError):
    """A branch the classification rules out was reached."""


class BracketingFailure(SubrankGapError):
    pass


class DomainError(SubrankGapError, ValueError):
    pass


class SearchExhausted(SubrankGapError):
    pass


class NotTight(SubrankGapError):
    pass


class BudgetExceeded(SubrankGapError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ParseError(SubrankGapError):
    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column
