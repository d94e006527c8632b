"""Single-technique match correction via sequential consistency.

A correct match in sequential navigation leaves a diagonal trail through
the score matrix: if query q matches reference c, then query q-1 should
have scored reference c-1 highly, and so on. Each of the current query's
top-K candidates is ranked by the average of the scores along its
back-shifted diagonal, and the candidate with the best average wins. When
the winner differs from the plain argmax, the frame is counted as
corrected and the gap between the two averages is the correction
magnitude, which doubles as an online health signal for the technique.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange, UnnormalizedStream
from .scores import ScoreStream, normalize_scores


@dataclass(frozen=True)
class SicConfig:
    """Correction parameters.

    top_k: number of score-ranked candidates to re-rank.
    max_lookback: maximum number of past queries in a consistency window.
    include_current: count the candidate's own score as part of its
        window. Keeping it on makes the no-history case degrade to plain
        argmax; the switch exists for sensitivity runs.
    """

    top_k: int = 50
    max_lookback: int = 1000
    include_current: bool = True

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if self.max_lookback < 0:
            raise ValueError(
                f"max_lookback must be >= 0, got {self.max_lookback}"
            )


@dataclass(frozen=True)
class CorrectionRecord:
    """Outcome of correcting one query frame.

    correction_magnitude is the winning candidate's average consistency
    minus the original argmax candidate's; it is 0 exactly when no
    correction was performed and positive otherwise.
    """

    query_index: int
    original_match: int
    corrected_match: int
    correction_magnitude: float
    winning_consistency: float
    corrected: bool


def _check_position(stream: ScoreStream, q: int, c: int) -> None:
    if not stream.normalized:
        raise UnnormalizedStream(
            "consistency values are only comparable on normalized streams"
        )
    if not 0 <= q < len(stream):
        raise IndexOutOfRange(f"query {q} not in [0, {len(stream)})")
    if not 0 <= c < (stream.num_refs or 0):
        raise IndexOutOfRange(
            f"reference {c} not in [0, {stream.num_refs})"
        )


def consistency_score(
    stream: ScoreStream, q: int, c: int, cfg: SicConfig
) -> float:
    """Average score along the diagonal ending at (q, c).

    The window walks back min(max_lookback, q, c) steps so neither the
    query index nor the reference index ever shifts below zero; the
    average divides by the clamped window size, keeping candidates with
    short histories comparable to candidates with long ones.
    """
    _check_position(stream, q, c)
    span = min(cfg.max_lookback, q, c)

    if cfg.include_current:
        total = stream.diag_prefix(q)[c]
        start_q, start_c = q - span - 1, c - span - 1
        if start_q >= 0 and start_c >= 0:
            total -= stream.diag_prefix(start_q)[start_c]
        return float(total / (span + 1))

    if span == 0:
        # No usable history: fall back to the candidate's own score.
        return float(stream.row(q)[c])
    total = stream.diag_prefix(q - 1)[c - 1]
    start_q, start_c = q - span - 1, c - span - 1
    if start_q >= 0 and start_c >= 0:
        total -= stream.diag_prefix(start_q)[start_c]
    return float(total / span)


def top_candidates(row: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores, ties broken by lower index."""
    order = np.argsort(-row, kind="stable")
    return order[: min(k, row.size)]


def correct_query(
    stream: ScoreStream, q: int, cfg: SicConfig
) -> CorrectionRecord:
    """Re-rank the top-K candidates of query q by sequential consistency.

    The candidate with the highest average consistency becomes the final
    prediction. Consistency ties break toward the higher original score,
    then the lower reference index, so runs are bit-reproducible.
    """
    _check_position(stream, q, 0 if stream.num_refs else -1)
    row = stream.row(q)
    candidates = top_candidates(row, cfg.top_k)
    original = int(candidates[0])

    best = original
    best_sc = consistency_score(stream, q, original, cfg)
    original_sc = best_sc
    for c in candidates[1:]:
        c = int(c)
        sc = consistency_score(stream, q, c, cfg)
        if sc > best_sc or (
            sc == best_sc
            and (row[c], -c) > (row[best], -best)
        ):
            best, best_sc = c, sc

    corrected = best != original
    return CorrectionRecord(
        query_index=q,
        original_match=original,
        corrected_match=best,
        correction_magnitude=best_sc - original_sc if corrected else 0.0,
        winning_consistency=best_sc,
        corrected=corrected,
    )


def iter_sic_over_dataset(provider, dataset, cfg: SicConfig | None = None):
    """Yield one CorrectionRecord per query, strictly in frame order.

    Each record is computed only from rows 0..q, so appending later
    frames can never change an earlier record.
    """
    cfg = cfg or SicConfig()
    stream = ScoreStream(normalized=True)
    for q in range(dataset.num_queries):
        norm, _ = normalize_scores(provider.score(q))
        stream.append(norm)
        yield correct_query(stream, q, cfg)


def run_sic_over_dataset(provider, dataset, cfg: SicConfig | None = None):
    """Correct every query of a dataset; returns list[CorrectionRecord]."""
    return list(iter_sic_over_dataset(provider, dataset, cfg))


CORRECTION_LOG_HEADER = (
    "query_index,original_match,corrected_match,magnitude,"
    "winning_consistency,corrected"
)


def write_correction_row(r: CorrectionRecord, fp: IO[str]) -> None:
    fp.write(
        f"{r.query_index},{r.original_match},{r.corrected_match},"
        f"{r.correction_magnitude!r},{r.winning_consistency!r},"
        f"{'true' if r.corrected else 'false'}\n"
    )


def write_correction_log(records: Iterable[CorrectionRecord], fp: IO[str]):
    """Write records as the per-run correction CSV."""
    fp.write(CORRECTION_LOG_HEADER + "\n")
    for r in records:
        write_correction_row(r, fp)


def predictions_from_records(
    records: Sequence[CorrectionRecord],
) -> np.ndarray:
    """Corrected match per query as an int array."""
    return np.array([r.corrected_match for r in records], dtype=np.int64)
