"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` used by the CLI's
error JSON and the service's failure payloads.
"""

from __future__ import annotations


class MethodTraceError(Exception):
    """Base class for all errors raised by this package."""

    code = "Error"


class CloneFailed(MethodTraceError):
    code = "CloneFailed"


class NotARepository(MethodTraceError):
    code = "NotARepository"


class UnknownCommit(MethodTraceError):
    code = "UnknownCommit"


class AmbiguousAbbreviation(MethodTraceError):
    code = "AmbiguousAbbreviation"


class FileAbsentAtCommit(MethodTraceError):
    code = "FileAbsentAtCommit"


class MethodNotFound(MethodTraceError):
    code = "MethodNotFound"


class StartFileAbsent(MethodTraceError):
    code = "StartFileAbsent"


class StartMethodNotFound(MethodTraceError):
    code = "StartMethodNotFound"


class ParseFailureAtStart(MethodTraceError):
    code = "ParseFailureAtStart"


class WorkdirNotEmpty(MethodTraceError):
    code = "WorkdirNotEmpty"


class StepInvalid(MethodTraceError):
    code = "StepInvalid"


class MalformedOracleFile(MethodTraceError):
    code = "MalformedOracleFile"


class EmptyInput(MethodTraceError):
    code = "EmptyInput"
