"""Exception types raised across the toolkit.

Grouped here so callers (and tests) can catch a specific failure kind
without importing the module that raised it.
"""


class CuedSpeechError(Exception):
    """Base class for all toolkit errors."""


class VocabError(CuedSpeechError):
    """Invalid vocabulary file or symbol table."""


class UnknownSymbolError(VocabError):
    """A symbol string could not be mapped to a vocabulary index."""


class MatrixFormatError(CuedSpeechError):
    """Malformed matrix file: bad header, bad cell, or non-finite value."""


class ManifestError(CuedSpeechError):
    """Malformed or inconsistent dataset manifest."""


class TrackTooShortError(CuedSpeechError):
    """Hand track has fewer than two points, so no motion can be measured."""


class ChartError(CuedSpeechError):
    """Invalid hand coding chart: unknown phoneme, duplicate or empty class."""


class HandPromptError(CuedSpeechError):
    """Hand prompt embedding failed: missing recognition or bad frame index."""


class ShapeMismatchError(CuedSpeechError):
    """Two matrices that must share a shape do not."""


class ScorerError(CuedSpeechError):
    """Attention scorer violated its contract (shape or normalization)."""


class DecodeFailureError(CuedSpeechError):
    """Beam search exhausted without any complete hypothesis.

    Carries the best live hypothesis (if any) for diagnostics.
    """

    def __init__(self, message, best_live=None):
        super().__init__(message)
        self.best_live = best_live


class BackendError(CuedSpeechError):
    """Base class for agent backend failures."""


class TransportError(BackendError):
    """Backend could not be reached or returned a non-success status."""


class ResponseParseError(BackendError):
    """Backend answered, but the payload is unusable. See subclasses."""


class MalformedResponseError(ResponseParseError):
    """Response is not a well-formed document of the expected shape."""


class CountMismatchError(ResponseParseError):
    """Response carries a different number of records than requested."""


class OutOfRangeError(ResponseParseError):
    """A recognized category id falls outside its legal range."""


class MetricError(CuedSpeechError):
    """Metric computation failed: empty reference or degenerate embedding."""


class ConfigError(CuedSpeechError):
    """Pipeline configuration failed to load or validate."""


class MissingArtifactError(CuedSpeechError):
    """A stage requires an upstream artifact that is not in the run directory."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage
