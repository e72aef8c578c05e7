"""Exception types shared across the toolkit."""

from __future__ import annotations


class BookprobeError(Exception):
    """Base class for all toolkit errors."""


class IngestError(BookprobeError):
    """Raw book input could not be decoded or read."""


class EmptyDocumentError(IngestError):
    """Ingest produced zero paragraphs."""


class EmptyInputError(BookprobeError):
    """An operation requiring non-empty input received none."""


class StructuralError(BookprobeError):
    """A record is missing a required piece (language, text variant, ...)."""


class NoNameError(BookprobeError):
    """Masking was requested on text containing no alias occurrence."""


class ConfigError(BookprobeError):
    """Invalid configuration value or unknown dimension/field name."""


class TranslationError(BookprobeError):
    """All translation providers failed for some inputs."""

    def __init__(self, message: str, failing_indices: list[int] | None = None):
        super().__init__(message)
        self.failing_indices = failing_indices or []


class MembershipUnavailableError(BookprobeError):
    """The n-gram index could not be reached; distinct from an 'unclear' label."""


class SinkWriteError(BookprobeError):
    """The probe result sink rejected a write; the run aborts with partial progress."""
