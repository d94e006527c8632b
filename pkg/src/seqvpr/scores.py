"""Score vectors, append-only score streams and per-vector z-normalization.

A score vector is a plain 1-D float64 ``numpy`` array with one similarity
score per reference place. A :class:`ScoreStream` collects one such vector
per query, in observation order, and never mutates a row once appended.

Streams also maintain rolling diagonal prefix sums so that windowed sums
along back-shifted diagonals (the quantity the correction engine averages)
cost O(1) per lookup instead of O(window).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVector, NonFiniteValue, ShapeMismatch


@dataclass(frozen=True)
class NormalizationParams:
    """Mean and population standard deviation of one score vector."""

    mean: float
    std_dev: float

    @property
    def degenerate(self) -> bool:
        """True when every input score was identical (std dev zero)."""
        return self.std_dev == 0.0


def as_score_vector(values) -> np.ndarray:
    """Coerce ``values`` to a 1-D finite float64 array.

    Raises NonFiniteValue if any entry is NaN or infinite, ShapeMismatch
    if the input is not one-dimensional.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeMismatch(f"score vector must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NonFiniteValue(f"non-finite score at index {bad}")
    return arr


def normalize_scores(raw) -> tuple[np.ndarray, NormalizationParams]:
    """Z-scale a score vector: subtract its mean, divide by its std dev.

    The standard deviation uses the population (divide-by-n) definition,
    so the output has mean 0 and population std 1. The transform is affine
    and monotone, so the argmax (and the full ranking) is unchanged.

    A flat input (std dev zero) cannot be scaled; the caller gets a zero
    vector and ``params.degenerate`` is True. Downstream consumers treat
    all candidates of such a row as tied.

    Returns:
        (normalized vector, NormalizationParams)
    """
    arr = as_score_vector(raw)
    if arr.size < 2:
        raise DegenerateVector(
            f"need at least 2 scores to normalize, got {arr.size}"
        )
    mean = float(arr.mean())
    std = float(arr.std())  # population definition
    params = NormalizationParams(mean=mean, std_dev=std)
    if params.degenerate:
        return np.zeros_like(arr), params
    return (arr - mean) / std, params


class ScoreStream:
    """Time-ordered, append-only matrix of score vectors.

    Row ``q`` is the score vector of the q-th query performed. Rows are
    immutable once appended (the backing arrays are marked read-only), so
    any number of readers may consume already-appended rows while a single
    writer appends new ones.

    ``normalized`` declares whether rows were z-scaled before appending;
    consistency comparisons across techniques require it and reject
    streams whose flag is False.
    """

    def __init__(self, normalized: bool = False):
        self.normalized = bool(normalized)
        self._rows: list[np.ndarray] = []
        self._diag: list[np.ndarray] = []  # rolling diagonal prefix sums
        self._num_refs: int | None = None

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def num_refs(self) -> int | None:
        """Reference count N, or None while the stream is empty."""
        return self._num_refs

    def append(self, scores) -> int:
        """Append one score vector; returns its query index.

        Raises ShapeMismatch when the vector length differs from the N
        established by the first row.
        """
        arr = as_score_vector(scores).copy()
        if self._num_refs is None:
            self._num_refs = arr.size
        elif arr.size != self._num_refs:
            raise ShapeMismatch(
                f"expected {self._num_refs} scores, got {arr.size}"
            )
        arr.flags.writeable = False

        # diag[q][i] = sum of scores along the diagonal ending at (q, i):
        # scores[q][i] + scores[q-1][i-1] + ... back to row 0 or column 0.
        cum = arr.astype(np.float64)
        if self._rows:
            cum = cum.copy()
            cum[1:] += self._diag[-1][:-1]
        cum.flags.writeable = False

        self._rows.append(arr)
        self._diag.append(cum)
        return len(self._rows) - 1

    def row(self, q: int) -> np.ndarray:
        """Read-only view of the q-th score vector."""
        return self._rows[q]

    def diag_prefix(self, q: int) -> np.ndarray:
        """Read-only diagonal prefix sums for row q (internal use)."""
        return self._diag[q]
