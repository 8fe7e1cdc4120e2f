"""Exception hierarchy.

Every error raised on bad user input derives from :class:`SprintError`; the
CLI maps those to exit code 2. :class:`InvariantViolation` signals a bug and
maps to exit code 3.
"""

from __future__ import annotations


class SprintError(Exception):
    """Base class for input and usage errors."""


class EmptyInput(SprintError):
    pass


class GranularityMismatch(SprintError):
    pass


class InvalidGranularity(SprintError):
    pass


class InvalidCurve(SprintError):
    pass


class MalformedSeries(SprintError):
    pass


class ZeroTotal(SprintError):
    pass


class BadPrefix(SprintError):
    pass


class InvalidParams(SprintError):
    pass


class EmptyModel(SprintError):
    pass


class UnknownCluster(SprintError):
    pass


class BadTotal(SprintError):
    pass


class Complete(SprintError):
    """The project already has an actual value for every checkpoint."""


class MalformedActual(SprintError):
    pass


class NoActuals(SprintError):
    pass


class DuplicateProject(SprintError):
    def __init__(self, project_id: str):
        super().__init__(f"duplicate project id: {project_id!r}")
        self.project_id = project_id


class BadDuration(SprintError):
    pass


class ParseError(SprintError):
    def __init__(self, message: str, *, line: int | None = None, record: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if record is not None:
            where.append(f"record {record}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.record = record


class UnsupportedVersion(SprintError):
    pass


class InvariantViolation(Exception):
    """An internal consistency check failed."""
