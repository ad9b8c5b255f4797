class ForlogError(Exception):
    """Base class for every error the interpreter reports."""


class ParseError(ForlogError):
    def __init__(self, message: str, line: int, column: int, found: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.found = found
        where = f" near {found!r}" if found else ""
        super().__init__(f"{line}:{column}: {message}{where}")


class ExecutionError(ForlogError):
    """A runtime error; aborts the current query (distinct from failure).

    `output` carries whatever the query had written before the error, once
    the driver has attached it.
    """

    output: str = ""


class InstantiationError(ExecutionError):
    pass


class TypeMismatchError(ExecutionError):
    pass


class UnknownPredicateError(ExecutionError):
    def __init__(self, name: str, arity: int):
        self.name = name
        self.arity = arity
        super().__init__(f"unknown predicate {name}/{arity}")


class DepthLimitError(ExecutionError):
    pass


class CyclicTermError(ExecutionError):
    pass


class InputError(ExecutionError):
    pass
