"""Exception types raised across the package."""


class FlatReachError(Exception):
    """Base class for all package errors."""


class DomainError(FlatReachError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(FlatReachError, ValueError):
    """A tuning parameter is invalid (non-positive scale, too-small window, ...)."""


class ResolutionError(FlatReachError, ValueError):
    """A curve is too coarsely sampled for the requested estimate."""


class FocalOnly(FlatReachError):
    """The reach is realized by curvature alone; there is no bottleneck pair."""


class ParseError(FlatReachError, ValueError):
    """A shape file could not be parsed.

    Parameters
    ----------
    message : str
        What went wrong.
    line, offset : int, optional
        1-based line number (text formats) or 0-based byte offset (binary).
    """

    def __init__(self, message, line=None, offset=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"byte {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.offset = offset


class FormatError(FlatReachError, ValueError):
    """A file parsed but violates the format contract (e.g. an open polygon)."""
