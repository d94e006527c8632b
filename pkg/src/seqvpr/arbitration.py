"""Per-frame arbitration across techniques and selection bookkeeping.

Every technique corrects itself independently on its own normalized
stream; the frame's final prediction comes from the technique whose
winning candidate achieved the highest average consistency. Comparing
consistency values across techniques is only meaningful after per-vector
z-normalization, so arbitration over raw streams is rejected.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .correction import CorrectionRecord, SicConfig, correct_query
from .errors import (
    EmptyWindow,
    MixedQueryIndices,
    UnnormalizedStream,
)
from .scores import ScoreStream, normalize_scores


@dataclass(frozen=True)
class FrameArbitration:
    """One frame's winner and the per-technique records behind it."""

    query_index: int
    winner: str
    prediction: int
    winner_consistency: float
    per_technique: dict[str, CorrectionRecord]


class SelectionHistory:
    """Ring buffer of the last M winning technique ids."""

    def __init__(self, window: int):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.window = window
        self._ring: deque[str] = deque(maxlen=window)

    def append(self, technique: str) -> None:
        self._ring.append(technique)

    def __len__(self) -> int:
        return len(self._ring)

    def items(self) -> tuple[str, ...]:
        return tuple(self._ring)


def coverage(
    history: SelectionHistory | Sequence[str],
    techniques: Sequence[str] | None = None,
) -> dict[str, float]:
    """Proportion of wins per technique over a selection history.

    Passing ``techniques`` adds explicit zero entries for techniques that
    never won, which keeps downstream logs complete. Proportions always
    sum to 1 for a non-empty history.
    """
    items = history.items() if isinstance(history, SelectionHistory) else tuple(history)
    if not items:
        raise EmptyWindow("coverage of an empty selection history")
    counts = Counter(items)
    out = {t: 0.0 for t in techniques} if techniques else {}
    for tech, n in counts.items():
        out[tech] = n / len(items)
    return out


def arbitrate_frame(
    records: Mapping[str, CorrectionRecord],
    order: Sequence[str] | None = None,
) -> FrameArbitration:
    """Pick the technique with the highest winning consistency.

    Ties go to the earlier technique in registration order (the mapping's
    insertion order unless ``order`` overrides it), so results do not
    depend on scoring completion timing.
    """
    if not records:
        raise ValueError("arbitration needs at least one technique record")
    ids = list(order) if order is not None else list(records)
    q = records[ids[0]].query_index
    winner = None
    for tech in ids:
        rec = records[tech]
        if rec.query_index != q:
            raise MixedQueryIndices(
                f"records mix query {q} and query {rec.query_index}"
            )
        if winner is None or rec.winning_consistency > records[winner].winning_consistency:
            winner = tech
    win = records[winner]
    return FrameArbitration(
        query_index=q,
        winner=winner,
        prediction=win.corrected_match,
        winner_consistency=win.winning_consistency,
        per_technique=dict(records),
    )


def arbitrate_streams(
    streams: Mapping[str, ScoreStream],
    q: int,
    cfg: SicConfig,
) -> FrameArbitration:
    """Correct query q on every stream, then arbitrate the winners."""
    for tech, stream in streams.items():
        if not stream.normalized:
            raise UnnormalizedStream(
                f"stream for technique '{tech}' is not normalized"
            )
    records = {tech: correct_query(s, q, cfg) for tech, s in streams.items()}
    return arbitrate_frame(records)


def iter_music_over_dataset(
    providers: Sequence, dataset, cfg: SicConfig | None = None
):
    """Yield per-frame arbitrations for the static full ensemble.

    Each provider's raw scores are z-normalized, appended to that
    technique's stream, corrected, and the frame's winner is chosen by
    consistency.
    """
    if not providers:
        raise ValueError("need at least one provider")
    cfg = cfg or SicConfig()
    streams = {p.id: ScoreStream(normalized=True) for p in providers}
    order = [p.id for p in providers]
    for q in range(dataset.num_queries):
        records = {}
        for p in providers:
            norm, _ = normalize_scores(p.score(q))
            streams[p.id].append(norm)
            records[p.id] = correct_query(streams[p.id], q, cfg)
        yield arbitrate_frame(records, order=order)


def run_music_over_dataset(
    providers: Sequence, dataset, cfg: SicConfig | None = None
) -> list[FrameArbitration]:
    """Arbitrate every frame; returns list[FrameArbitration]."""
    return list(iter_music_over_dataset(providers, dataset, cfg))


def coverage_summary(arbitrations: Sequence[FrameArbitration]) -> dict[str, float]:
    """Full-run win proportions, keyed by technique id."""
    techniques = list(arbitrations[0].per_technique) if arbitrations else []
    return coverage([a.winner for a in arbitrations], techniques=techniques)


def write_arbitration_header(order: Sequence[str], fp: IO[str]) -> None:
    cols = ["query_index", "winner", "prediction", "winner_consistency"]
    for tech in order:
        cols += [f"{tech}_match", f"{tech}_magnitude"]
    fp.write(",".join(cols) + "\n")


def write_arbitration_row(
    arb: FrameArbitration, order: Sequence[str], fp: IO[str]
) -> None:
    row = [
        str(arb.query_index),
        arb.winner,
        str(arb.prediction),
        repr(arb.winner_consistency),
    ]
    for tech in order:
        rec = arb.per_technique[tech]
        row += [str(rec.corrected_match), repr(rec.correction_magnitude)]
    fp.write(",".join(row) + "\n")


def write_arbitration_log(
    arbitrations: Iterable[FrameArbitration],
    order: Sequence[str],
    fp: IO[str],
) -> None:
    """CSV log: frame winner plus one (match, magnitude) pair per technique."""
    write_arbitration_header(order, fp)
    for arb in arbitrations:
        write_arbitration_row(arb, order, fp)


def write_coverage_summary(
    arbitrations: Sequence[FrameArbitration], fp: IO[str]
) -> None:
    fp.write(json.dumps(coverage_summary(arbitrations), sort_keys=True))
    fp.write("\n")
