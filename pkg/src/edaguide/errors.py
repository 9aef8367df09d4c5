"""Exception hierarchy shared by every engine module.

Each error carries a stable machine-readable ``code`` so the HTTP layer can
map failures onto the wire error envelope without string matching.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class; ``code`` is stable across releases."""

    code = "EngineError"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details


# --- dataset ingestion ---

class EmptyInput(EngineError):
    code = "EmptyInput"


class RaggedRows(EngineError):
    code = "RaggedRows"


class DuplicateColumnName(EngineError):
    code = "DuplicateColumnName"


# --- statistics kernel ---

class UnknownColumn(EngineError):
    code = "UnknownColumn"


class RoleMismatch(EngineError):
    code = "RoleMismatch"


class InsufficientData(EngineError):
    code = "InsufficientData"


class ZeroVariance(EngineError):
    code = "ZeroVariance"


class TooFewGroups(EngineError):
    code = "TooFewGroups"


# --- session state machine ---

class NoMatchingInsight(EngineError):
    code = "NoMatchingInsight"


class UnknownCell(EngineError):
    code = "UnknownCell"


class ArchivedCell(EngineError):
    code = "ArchivedCell"


class UnknownQuestion(EngineError):
    code = "UnknownQuestion"


class NotAVisualizationCell(EngineError):
    code = "NotAVisualizationCell"


class NotAnActionList(EngineError):
    code = "NotAnActionList"


class IndexOutOfRange(EngineError):
    code = "IndexOutOfRange"


class AlreadyArchived(EngineError):
    code = "AlreadyArchived"


class CannotDeleteRoot(EngineError):
    code = "CannotDeleteRoot"


class NotArchived(EngineError):
    code = "NotArchived"


class CorruptLog(EngineError):
    code = "CorruptLog"


class VersionMismatch(EngineError):
    code = "VersionMismatch"


# --- charts ---

class UnsupportedInsight(EngineError):
    code = "UnsupportedInsight"


class InvalidChartSpec(EngineError):
    code = "InvalidChartSpec"


# --- service ---

class UnknownDataset(EngineError):
    code = "UnknownDataset"


class UnknownSession(EngineError):
    code = "UnknownSession"
