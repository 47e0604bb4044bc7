"""Exception hierarchy."""


class CasimirError(Exception):
    """Base class for all package errors."""


class UnknownMaterial(CasimirError, KeyError):
    def __init__(self, name, available):
        self.name = name
        self.available = tuple(available)
        super().__init__(f"unknown material {name!r}; available: {', '.join(self.available)}")

    def __str__(self):
        return self.args[0]


class TableError(CasimirError, ValueError):
    """Malformed or invalid optical data table."""


class ParseError(TableError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = f"{path}:{line}: " if line is not None else ""
        super().__init__(where + message)


class GridError(TableError):
    pass


class InsufficientData(TableError):
    pass


class DomainError(CasimirError, ValueError):
    pass


class ConfigError(CasimirError, ValueError):
    pass


class ModelError(CasimirError, ValueError):
    pass


class ConvergenceError(CasimirError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class NoCrossing(CasimirError):
    pass


class NoExtremum(CasimirError):
    pass


class OnsetNotReached(CasimirError):
    pass
