"""Adaptive ensemble controller.

Lifecycle: run the whole ensemble for the first M frames (bootstrap),
pick the cheapest subset whose cumulative win coverage reaches the
threshold, then run only that subset. Every M frames the subset's
correction magnitudes are compared against the previous window with a
paired two-tailed t test; a significant shift means the active subset's
behaviour changed, so the full ensemble is re-run over those same M
buffered frames, coverage is recomputed and a possibly different subset
takes over. A healthy, stable subset corrects nothing, both windows stay
all-zero, and the degenerate test rule keeps the system quiescent.

Emitted predictions are streaming and never revised; re-selection only
changes which techniques run next.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .arbitration import (
    FrameArbitration,
    SelectionHistory,
    arbitrate_frame,
    coverage,
)
from .correction import CorrectionRecord, SicConfig, correct_query
from .errors import BufferUnderrun, EmptyCoverage, WindowIncomplete
from .scores import ScoreStream, normalize_scores
from .stats import paired_t_test

BOOTSTRAP = "bootstrap"
MONITORING = "monitoring"
RESELECTING = "reselecting"


@dataclass(frozen=True)
class AdaptiveConfig:
    """Controller parameters.

    coverage_threshold: cumulative win share the subset must reach.
    window: M, both the selection history length and the span between
        t-test checks; at least 2 so the test has enough pairs.
    alpha: significance level of the re-selection trigger.
    """

    coverage_threshold: float = 0.7
    window: int = 10
    alpha: float = 0.05
    sic: SicConfig = SicConfig()

    def __post_init__(self):
        if not 0.0 < self.coverage_threshold <= 1.0:
            raise ValueError(
                f"coverage_threshold must be in (0, 1], "
                f"got {self.coverage_threshold}"
            )
        if self.window < 2:
            raise ValueError(f"window must be >= 2, got {self.window}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class ReselectionEvent:
    trigger_frame: int
    p_value: float
    old_subset: tuple[str, ...]
    new_subset: tuple[str, ...]
    coverage_at_trigger: dict[str, float]


@dataclass(frozen=True)
class EnsembleState:
    """Telemetry snapshot of the controller between frames."""

    active_subset: tuple[str, ...]
    baseline_correction: tuple[float, ...]
    phase: str
    frames_since_window_start: int


@dataclass(frozen=True)
class StepResult:
    query_index: int
    prediction: int
    technique: str
    consistency: float
    active_subset: tuple[str, ...]
    events: tuple[ReselectionEvent, ...]
    per_technique: dict[str, CorrectionRecord]


def select_subset(
    cov: Mapping[str, float], threshold: float, order: Sequence[str]
) -> list[str]:
    """Shortest coverage-descending prefix reaching the threshold.

    Ties break by ensemble order. The top technique is always included;
    the prefix grows until the cumulative share reaches the threshold or
    every technique is in.
    """
    if not cov:
        raise EmptyCoverage("cannot select from an empty coverage vector")
    rank = {t: i for i, t in enumerate(order)}
    ranked = sorted(cov, key=lambda t: (-cov[t], rank.get(t, len(order))))
    subset: list[str] = []
    total = 0.0
    for tech in ranked:
        subset.append(tech)
        total += cov[tech]
        if total >= threshold:
            break
    return subset


def window_correction_vector(
    records: Mapping[str, Sequence[CorrectionRecord]],
    subset: Sequence[str],
    window: int,
) -> np.ndarray:
    """Concatenated correction magnitudes, subset order then frame order."""
    parts = []
    for tech in subset:
        recs = records.get(tech, ())
        if len(recs) != window:
            raise WindowIncomplete(
                f"technique '{tech}' has {len(recs)} records, "
                f"window needs {window}"
            )
        parts.append([r.correction_magnitude for r in recs])
    return np.concatenate(parts) if parts else np.empty(0)


class AdaptiveEnsemble:
    """Single-owner state machine; call :meth:`step` once per frame."""

    def __init__(self, providers: Sequence, config: AdaptiveConfig | None = None):
        if not providers:
            raise ValueError("need at least one provider")
        ids = [p.id for p in providers]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate technique ids in {ids}")
        self.config = config or AdaptiveConfig()
        self._providers = {p.id: p for p in providers}
        self._order = ids
        self._phase = BOOTSTRAP
        self._active = list(ids)
        self._frame = 0
        self._window_count = 0
        # Per-technique stream plus the engine frame its row 0 maps to.
        self._streams = {t: ScoreStream(normalized=True) for t in ids}
        self._offsets = {t: 0 for t in ids}
        self._window_records: dict[str, list[CorrectionRecord]] = {
            t: [] for t in ids
        }
        self._baseline: np.ndarray | None = None
        self._history = SelectionHistory(self.config.window)
        self.events: list[ReselectionEvent] = []
        self.technique_run_counts: list[int] = []
        self.last_p_value: float | None = None

    @property
    def state(self) -> EnsembleState:
        baseline = (
            tuple(float(x) for x in self._baseline)
            if self._baseline is not None
            else ()
        )
        return EnsembleState(
            active_subset=tuple(self._active),
            baseline_correction=baseline,
            phase=self._phase,
            frames_since_window_start=self._window_count,
        )

    def _score_and_correct(self, tech: str, frame: int) -> CorrectionRecord:
        """Advance one technique's stream to ``frame`` and correct it."""
        provider = self._providers[tech]
        raw = provider.score(frame)
        norm, _ = normalize_scores(raw)
        stream = self._streams[tech]
        local = stream.append(norm)
        assert local == frame - self._offsets[tech]
        rec = correct_query(stream, local, self.config.sic)
        return replace(rec, query_index=frame)

    def step(self) -> StepResult:
        q = self._frame
        cfg = self.config
        events: list[ReselectionEvent] = []

        running = self._order if self._phase == BOOTSTRAP else self._active
        records = {t: self._score_and_correct(t, q) for t in running}
        arb = arbitrate_frame(records, order=running)
        self._history.append(arb.winner)
        for t in running:
            self._window_records[t].append(records[t])
        self.technique_run_counts.append(len(running))
        self._window_count += 1

        if self._phase == BOOTSTRAP and self._window_count == cfg.window:
            self._finish_bootstrap()
        elif self._phase == MONITORING and self._window_count == cfg.window:
            event = self._check_window(q)
            if event is not None:
                events.append(event)
                self.events.append(event)

        self._frame += 1
        return StepResult(
            query_index=q,
            prediction=arb.prediction,
            technique=arb.winner,
            consistency=arb.winner_consistency,
            active_subset=tuple(running),
            events=tuple(events),
            per_technique=records,
        )

    def _finish_bootstrap(self) -> None:
        cov = coverage(self._history, techniques=self._order)
        self._active = select_subset(
            cov, self.config.coverage_threshold, self._order
        )
        self._baseline = window_correction_vector(
            self._window_records, self._active, self.config.window
        )
        self._retain_active_streams()
        self._reset_window()
        self._phase = MONITORING

    def _check_window(self, q: int) -> ReselectionEvent | None:
        """Window boundary: compare corrections, maybe re-select."""
        current = window_correction_vector(
            self._window_records, self._active, self.config.window
        )
        result = paired_t_test(self._baseline, current, self.config.alpha)
        self.last_p_value = result.p_value
        event = None
        if result.reject_h0:
            event = self._reselect(q, result.p_value)
        else:
            self._baseline = current
        self._reset_window()
        return event

    def _reselect(self, q: int, p_value: float) -> ReselectionEvent:
        """Re-run the full ensemble over the trigger window's M frames."""
        self._phase = RESELECTING
        cfg = self.config
        start = q - cfg.window + 1
        all_records: dict[str, list[CorrectionRecord]] = {}
        for tech in self._order:
            if tech in self._active:
                all_records[tech] = self._window_records[tech]
                continue
            provider = self._providers[tech]
            if (
                provider.buffer_window is not None
                and provider.buffer_window < cfg.window - 1
            ):
                raise BufferUnderrun(
                    f"technique '{tech}' buffers {provider.buffer_window} "
                    f"frames, re-selection needs {cfg.window - 1}"
                )
            # Dormant technique: fresh stream over the buffered window; its
            # consistency lookback is clamped to this rebuilt history.
            stream = ScoreStream(normalized=True)
            recs = []
            for frame in range(start, q + 1):
                norm, _ = normalize_scores(provider.score(frame))
                local = stream.append(norm)
                rec = correct_query(stream, local, cfg.sic)
                recs.append(replace(rec, query_index=frame))
            self._streams[tech] = stream
            self._offsets[tech] = start
            all_records[tech] = recs

        winners = []
        for j in range(cfg.window):
            frame_records = {t: all_records[t][j] for t in self._order}
            winners.append(arbitrate_frame(frame_records, order=self._order).winner)
        for w in winners:
            self._history.append(w)
        cov = coverage(winners, techniques=self._order)

        old = tuple(self._active)
        self._active = select_subset(cov, cfg.coverage_threshold, self._order)
        self._baseline = window_correction_vector(
            all_records, self._active, cfg.window
        )
        self._retain_active_streams()
        # The rescored frames really ran the whole ensemble.
        n_total = len(self._order)
        for frame in range(q - cfg.window + 1, q + 1):
            self.technique_run_counts[frame] = n_total
        self._phase = MONITORING
        return ReselectionEvent(
            trigger_frame=q,
            p_value=p_value,
            old_subset=old,
            new_subset=tuple(self._active),
            coverage_at_trigger=cov,
        )

    def _retain_active_streams(self) -> None:
        """Drop streams of dormant techniques; they rebuild on return."""
        for tech in self._order:
            if tech not in self._active and tech in self._streams:
                del self._streams[tech]
                del self._offsets[tech]

    def _reset_window(self) -> None:
        self._window_records = {t: [] for t in self._order}
        self._window_count = 0


@dataclass
class AdaptiveRun:
    """Everything a finished adaptive run produced."""

    steps: list[StepResult]
    events: list[ReselectionEvent]
    technique_run_counts: list[int]

    @property
    def predictions(self) -> list[int]:
        return [s.prediction for s in self.steps]

    @property
    def confidences(self) -> list[float]:
        return [s.consistency for s in self.steps]


def run_amusic_over_dataset(
    providers: Sequence, dataset, config: AdaptiveConfig | None = None
) -> AdaptiveRun:
    """Drive the adaptive controller over every query of a dataset."""
    engine = AdaptiveEnsemble(providers, config)
    steps = [engine.step() for _ in range(dataset.num_queries)]
    return AdaptiveRun(
        steps=steps,
        events=list(engine.events),
        technique_run_counts=list(engine.technique_run_counts),
    )


def write_step_record(s: StepResult, fp: IO[str]) -> None:
    fp.write(json.dumps({
        "q": s.query_index,
        "subset": list(s.active_subset),
        "chosen_technique": s.technique,
        "prediction": s.prediction,
        "consistency": s.consistency,
    }, sort_keys=True) + "\n")


def write_reselection_record(e: ReselectionEvent, fp: IO[str]) -> None:
    fp.write(json.dumps({
        "q": e.trigger_frame,
        "p_value": e.p_value,
        "old_subset": list(e.old_subset),
        "new_subset": list(e.new_subset),
    }, sort_keys=True) + "\n")


def write_event_log(
    steps: Iterable[StepResult],
    events: Sequence[ReselectionEvent],
    fp: IO[str],
) -> None:
    """JSON-lines log: one record per frame, plus re-selection records."""
    by_frame = {e.trigger_frame: e for e in events}
    for s in steps:
        write_step_record(s, fp)
        event = by_frame.get(s.query_index)
        if event is not None:
            write_reselection_record(event, fp)
