class SetUnifyError(Exception):
    """Base class for every error raised by this package."""


class IllTypedUnion(SetUnifyError):
    """A set position (union argument, insertion tail) holds an individual."""


class NotASetTerm(SetUnifyError):
    pass


class NotGround(SetUnifyError):
    pass


class WrongClass(SetUnifyError):
    """An operation received terms outside the syntactic class it handles."""


class WrongTheory(SetUnifyError):
    """A solver received constructors its equational theory does not cover."""


class StyleUnavailable(SetUnifyError):
    pass


class Unsat(SetUnifyError):
    pass


class StepBudgetExceeded(SetUnifyError):
    pass


class ParseError(SetUnifyError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column
