"""Exception types shared across the toolkit.

All toolkit-raised exceptions derive from :class:`SynthMetricsError` so callers
can catch one base class. Usage/manifest problems derive from
:class:`ManifestError` and map to CLI exit code 2; everything else maps to 1.
"""


class SynthMetricsError(Exception):
    """Base class for all toolkit errors."""


class FormatError(SynthMetricsError):
    """A binary or text input does not match its declared format."""


class TruncationError(FormatError):
    """A payload is shorter than its header declares."""

    def __init__(self, what: str, expected_bytes: int, actual_bytes: int):
        super().__init__(
            f"{what}: truncated payload, expected {expected_bytes} bytes "
            f"but found {actual_bytes}"
        )
        self.expected_bytes = expected_bytes
        self.actual_bytes = actual_bytes


class DimensionMismatchError(SynthMetricsError):
    """Images or matrices that must share a shape do not."""


class EmptySetError(SynthMetricsError):
    """A source that must yield at least one image yielded none."""


class TooFewSamplesError(SynthMetricsError):
    """An operation needs more samples than are available or selected."""


class ZeroNormRowError(SynthMetricsError):
    """An embedding row has zero norm, so its direction is undefined."""

    def __init__(self, row_index: int):
        super().__init__(f"embedding row {row_index} has zero norm")
        self.row_index = row_index


class EmbedderMismatchError(SynthMetricsError):
    """Two embedding sources were produced by different embedders."""


class NumericalError(SynthMetricsError):
    """A numerical routine failed beyond recoverable tolerance."""


class InsufficientTrialsError(SynthMetricsError):
    """A sweep result lacks the fractions or trials an analysis needs."""


class ManifestError(SynthMetricsError):
    """A manifest is malformed or does not resolve a requested entry."""
