"""Exception hierarchy shared across the library.

All library-raised errors derive from :class:`SeqVprError` so callers can
catch the whole family with one clause. The CLI maps these onto exit codes
(config errors -> 2, data errors -> 3, everything unexpected -> 1).
"""


class SeqVprError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SeqVprError):
    """Invalid run or profile configuration. Message names the field."""


class DataError(SeqVprError):
    """Input data is missing, malformed or inconsistent."""


class DegenerateVector(SeqVprError):
    """A score vector is too short to normalize."""


class NonFiniteValue(DataError):
    """NaN or infinity encountered where finite values are required."""


class ShapeMismatch(DataError):
    """Vector or matrix dimensions differ from what the stream expects."""


class IndexOutOfRange(SeqVprError):
    """Query or reference index outside the valid range."""


class UnnormalizedStream(SeqVprError):
    """An operation that compares consistency values got raw scores."""


class ZeroVector(DataError):
    """Cosine similarity is undefined for a zero-norm operand."""


class BadMagic(DataError):
    """File header is not a valid VPRD (or PGM) header."""


class TruncatedFile(DataError):
    """File body ends before the header-declared payload."""


class ImageTooSmall(DataError):
    """Image cannot produce the configured descriptor grid."""


class MixedQueryIndices(SeqVprError):
    """Arbitration received correction records for different queries."""


class EmptyWindow(SeqVprError):
    """Coverage requested over an empty selection history."""


class LengthMismatch(SeqVprError):
    """Paired samples have different lengths."""


class TooFewSamples(SeqVprError):
    """A paired test needs at least two sample pairs."""


class InvalidDof(SeqVprError):
    """Student-t degrees of freedom must be a positive integer."""


class EmptyCoverage(SeqVprError):
    """Subset selection requires a non-empty coverage vector."""


class WindowIncomplete(SeqVprError):
    """A correction window is missing records for some technique."""


class BufferUnderrun(SeqVprError):
    """A provider cannot rescore far enough back for a re-selection."""


class MissingGroundTruth(SeqVprError):
    """Explicit ground truth has no entry for a query."""


class CountOutOfRange(SeqVprError):
    """A per-query technique count lies outside [1, ensemble size]."""
