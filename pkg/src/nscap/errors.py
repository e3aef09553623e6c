"""Exception types raised across the package."""


class NscapError(Exception):
    pass


class DomainError(NscapError, ValueError):
    """An argument lies outside the domain of an operation."""


class FormatError(NscapError):
    """A persisted vertex-set file is malformed."""


class StateError(NscapError):
    """A prerequisite artifact (cached vertex set, cut) is missing."""


class GeometryError(NscapError):
    """An H-representation is inconsistent or unbounded."""


class SolverError(NscapError, ArithmeticError):
    """The SDP solver failed to converge within its iteration budget."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
