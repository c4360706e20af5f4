"""Exception hierarchy shared across the toolkit.

Everything raised on purpose derives from LotforgeError so callers (CLI,
service) can separate expected input problems from genuine bugs.
"""

from __future__ import annotations


class LotforgeError(Exception):
    """Base class for all expected failures."""


class DimensionError(LotforgeError):
    """Lot dimensions outside the supported range."""


class PoseError(LotforgeError):
    """Pose field out of bounds (scale, non-finite coordinates)."""


class UnknownEntryError(LotforgeError):
    """An entry id that does not resolve in the active catalog."""


class PlacementError(LotforgeError):
    """Transformed footprint lies fully outside the lot."""


class NotFoundError(LotforgeError):
    """A referenced instance, scene, or record does not exist."""


class AffordanceError(LotforgeError):
    """Operation requires an affordance the entry does not carry."""


class SceneDocumentError(LotforgeError):
    """Scene document text is malformed or violates the schema."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class VersionError(SceneDocumentError):
    """Document declares a format version this build does not read."""


class CatalogError(LotforgeError):
    """Catalog document is malformed, duplicated, or dangling."""


class ValidationFailed(LotforgeError):
    """A scene carries error-severity validation issues."""

    def __init__(self, issues):
        super().__init__("; ".join(f"{i.code}: {i.message}" for i in issues))
        self.issues = list(issues)


class IngestError(LotforgeError):
    """A tabular input row violates the ratings/responses schema."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class MissingDataError(LotforgeError):
    """An aggregation group that must be non-empty has no rows."""


class ConfigError(LotforgeError):
    """Score or analysis configuration is incomplete or inconsistent."""
