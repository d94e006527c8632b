"""Ground truth handling and run metrics.

Metrics are pure post-hoc functions over immutable prediction logs:
accuracy, precision-recall sweeps over descending confidence thresholds,
PR area, and the proportion-of-technique-runs (PTR) compute proxy

    PTR = (1 / (Q * |T|)) * sum_q |subset used at q|

which is 1 when the whole ensemble runs every frame and 1/|T| when a
single technique always suffices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, CountOutOfRange, MissingGroundTruth

FRAME_ALIGNED = "frame-aligned"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class GroundTruth:
    """Which reference places count as correct for each query.

    frame-aligned mode: query q's true match is reference q, accepted
    within ``tolerance`` frames either side. explicit mode: ``mapping``
    lists inclusive (low, high) reference ranges per query.
    """

    mode: str = FRAME_ALIGNED
    tolerance: int = 0
    mapping: dict[int, tuple[tuple[int, int], ...]] | None = None

    def __post_init__(self):
        if self.mode not in (FRAME_ALIGNED, EXPLICIT):
            raise ConfigError(f"unknown ground-truth mode '{self.mode}'")
        if self.tolerance < 0:
            raise ConfigError(f"tolerance must be >= 0, got {self.tolerance}")
        if self.mode == EXPLICIT:
            if not self.mapping:
                raise ConfigError("explicit ground truth needs a mapping")
            for q, ranges in self.mapping.items():
                if not ranges:
                    raise ConfigError(f"query {q}: empty ground-truth ranges")


def is_correct(prediction: int, q: int, gt: GroundTruth) -> bool:
    """Whether a predicted reference index is acceptable for query q."""
    if gt.mode == FRAME_ALIGNED:
        return abs(int(prediction) - int(q)) <= gt.tolerance
    ranges = gt.mapping.get(int(q))
    if ranges is None:
        raise MissingGroundTruth(f"no ground truth for query {q}")
    return any(lo <= prediction <= hi for lo, hi in ranges)


@dataclass
class PredictionLog:
    """Ordered per-query predictions with confidences and run counts.

    confidence is the winning consistency for corrected pipelines and the
    raw top score for uncorrected baselines. technique_counts feeds PTR.
    """

    predictions: list[int] = field(default_factory=list)
    confidences: list[float] = field(default_factory=list)
    technique_counts: list[int] = field(default_factory=list)
    techniques: list[str] = field(default_factory=list)

    def append(self, prediction: int, confidence: float,
               technique_count: int, technique: str = "") -> None:
        self.predictions.append(int(prediction))
        self.confidences.append(float(confidence))
        self.technique_counts.append(int(technique_count))
        self.techniques.append(technique)

    def __len__(self) -> int:
        return len(self.predictions)


class PrPoint(NamedTuple):
    precision: float
    recall: float
    threshold: float


def correctness(log: PredictionLog, gt: GroundTruth) -> np.ndarray:
    return np.array(
        [is_correct(p, q, gt) for q, p in enumerate(log.predictions)],
        dtype=bool,
    )


def accuracy(log: PredictionLog, gt: GroundTruth) -> float:
    """Fraction of queries whose prediction is within tolerance."""
    if len(log) == 0:
        raise ValueError("empty prediction log")
    return float(correctness(log, gt).mean())


def pr_curve(log: PredictionLog, gt: GroundTruth) -> list[PrPoint]:
    """Precision-recall sweep over descending distinct confidences.

    At each threshold the retained set is every query with confidence at
    or above it, so equal-confidence predictions enter together and the
    curve does not depend on input order. Recall divides by the total
    query count (every query has a correct match available).
    """
    if len(log) == 0:
        raise ValueError("empty prediction log")
    conf = np.asarray(log.confidences, dtype=np.float64)
    correct = correctness(log, gt)
    total = len(log)

    order = np.argsort(-conf, kind="stable")
    conf_sorted = conf[order]
    cum_correct = np.cumsum(correct[order])
    # Last position of each distinct confidence value.
    ends = np.flatnonzero(np.diff(conf_sorted) != 0)
    ends = np.append(ends, total - 1)

    points = []
    for e in ends:
        retained = e + 1
        hits = int(cum_correct[e])
        points.append(
            PrPoint(hits / retained, hits / total, float(conf_sorted[e]))
        )
    return points


def auc(points: Sequence[PrPoint]) -> float:
    """Area under a PR sweep, integrated over the recall axis.

    The first point's precision extends flat to recall zero (an all
    correct log therefore scores exactly 1); successive points are joined
    by trapezoids. Clipped to [0, 1].
    """
    if not points:
        raise ValueError("need at least one PR point")
    area = points[0].precision * points[0].recall
    for prev, cur in zip(points, points[1:]):
        area += (cur.recall - prev.recall) * (prev.precision + cur.precision) / 2.0
    return float(min(max(area, 0.0), 1.0))


def ptr(log: PredictionLog, ensemble_size: int) -> float:
    """Proportion of technique runs actually executed."""
    if ensemble_size < 1:
        raise ValueError(f"ensemble_size must be >= 1, got {ensemble_size}")
    counts = np.asarray(log.technique_counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("empty prediction log")
    if np.any(counts < 1) or np.any(counts > ensemble_size):
        bad = int(
            np.flatnonzero((counts < 1) | (counts > ensemble_size))[0]
        )
        raise CountOutOfRange(
            f"query {bad}: count {counts[bad]} outside [1, {ensemble_size}]"
        )
    return float(counts.sum() / (counts.size * ensemble_size))


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    pr_points: tuple[PrPoint, ...]
    auc: float
    ptr: float
    reselection_count: int

    def to_json_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "auc": self.auc,
            "pr_points": [[p.precision, p.recall] for p in self.pr_points],
            "ptr": self.ptr,
            "reselection_count": self.reselection_count,
        }


def evaluate(log: PredictionLog, gt: GroundTruth, ensemble_size: int,
             reselection_count: int = 0) -> EvalReport:
    """All metrics of one run in a single report."""
    points = pr_curve(log, gt)
    return EvalReport(
        accuracy=accuracy(log, gt),
        pr_points=tuple(points),
        auc=auc(points),
        ptr=ptr(log, ensemble_size),
        reselection_count=reselection_count,
    )


def write_report_json(report: EvalReport, fp: IO[str]) -> None:
    fp.write(json.dumps(report.to_json_dict(), sort_keys=True))
    fp.write("\n")


def write_pr_csv(points: Sequence[PrPoint], fp: IO[str]) -> None:
    fp.write("precision,recall,threshold\n")
    for p in points:
        fp.write(f"{p.precision!r},{p.recall!r},{p.threshold!r}\n")
