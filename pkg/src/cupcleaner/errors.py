"""Shared exception types."""


class CupCleanerError(Exception):
    """Base class for all package errors."""


class InputError(CupCleanerError):
    """Unusable input: missing files, empty datasets, inconsistent arguments."""


class ProviderError(CupCleanerError):
    """Systemic embedding-provider failure; aborts the run."""


class TransportError(ProviderError):
    """Provider unreachable after bounded retries."""


class ProtocolError(ProviderError):
    """Provider answered but violated the wire contract (dim mismatch, bad payload)."""


class EmbedError(CupCleanerError):
    """Per-text embedding failure; the affected samples are reported as unscored."""
