"""Exception hierarchy shared by all modules."""


class VamalgError(Exception):
    """Base class for every error raised by this package."""


class CapExceeded(VamalgError):
    """A finite group grew beyond the configured table cap."""


class DegreeMismatch(VamalgError):
    pass


class ParentMismatch(VamalgError):
    """An element does not belong to the extension it was used with."""


class ZeroVector(VamalgError):
    pass


class NoIntegralSolution(VamalgError):
    pass


class NotDivisible(VamalgError):
    pass


class IncompatibleInputs(VamalgError):
    pass


class UnsupportedFiniteEdge(VamalgError):
    """The amalgamated subgroup is finite; only infinite edges are handled."""


class TrivialEdgeWord(VamalgError):
    pass


class ZeroOnEdge(VamalgError):
    pass


class DisconnectedGraph(VamalgError):
    pass


class ValidationError(VamalgError):
    """Input failed structural validation; ``report`` holds the failed checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StageError(VamalgError):
    """A pipeline stage failed; ``stage`` names where."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class ParseError(VamalgError):
    pass


class SchemaError(VamalgError):
    def __init__(self, field, message=None):
        super().__init__(message or f"missing or ill-typed field {field!r}")
        self.field = field
