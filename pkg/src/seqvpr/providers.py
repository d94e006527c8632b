"""Pluggable per-query score sources.

A provider answers ``score(q)`` with one similarity vector over all
reference places. Providers are read-only after construction and
deterministic: the same q always yields the same vector, and any q inside
the buffered window can be rescored later (the adaptive controller relies
on this to re-evaluate dormant techniques retroactively). Every provider
here keeps its full input in memory, so the window is unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, IndexOutOfRange, ShapeMismatch, ZeroVector
from .evaluation import GroundTruth
from .hog import HogConfig, hog_descriptor
from .io import ROLE_SCORES, load_pgm, load_score_csv, load_vprd


@dataclass(frozen=True)
class DatasetBundle:
    """What a run needs beyond the providers: length and ground truth."""

    num_queries: int
    ground_truth: GroundTruth
    name: str = ""


def cosine_score_vector(query_desc, refs) -> np.ndarray:
    """Cosine similarity of one descriptor against every reference row."""
    q = np.asarray(query_desc, dtype=np.float64)
    r = np.asarray(refs, dtype=np.float64)
    if q.ndim != 1 or r.ndim != 2 or r.shape[1] != q.size:
        raise ShapeMismatch(
            f"descriptor dims {q.shape} do not match references {r.shape}"
        )
    qn = np.linalg.norm(q)
    rn = np.linalg.norm(r, axis=1)
    if qn == 0.0:
        raise ZeroVector("query descriptor has zero norm")
    if np.any(rn == 0.0):
        bad = int(np.flatnonzero(rn == 0.0)[0])
        raise ZeroVector(f"reference descriptor {bad} has zero norm")
    return (r @ q) / (rn * qn)


class TechniqueProvider:
    """Base interface: a named, deterministic source of score vectors."""

    id: str
    kind: str
    cost_estimate_ms: float = 0.0
    # None means the provider can rescore any past query.
    buffer_window: int | None = None

    @property
    def num_refs(self) -> int:
        raise NotImplementedError

    @property
    def num_queries(self) -> int:
        raise NotImplementedError

    def score(self, q: int) -> np.ndarray:
        raise NotImplementedError

    def _check_query(self, q: int) -> None:
        if not 0 <= q < self.num_queries:
            raise IndexOutOfRange(
                f"{self.id}: query {q} not in [0, {self.num_queries})"
            )


class PrecomputedScoresProvider(TechniqueProvider):
    """Scores straight from a Q x N matrix (VPRD or CSV file, or array)."""

    kind = "precomputed-scores"

    def __init__(self, id: str, matrix, cost_estimate_ms: float = 0.0):
        self.id = id
        self.cost_estimate_ms = cost_estimate_ms
        self._matrix = np.asarray(matrix, dtype=np.float64)
        if self._matrix.ndim != 2:
            raise ShapeMismatch(
                f"score matrix must be 2-D, got {self._matrix.shape}"
            )
        self._matrix.flags.writeable = False

    @classmethod
    def from_file(cls, id: str, path, **kw) -> "PrecomputedScoresProvider":
        path = Path(path)
        if path.suffix.lower() == ".csv":
            return cls(id, load_score_csv(path), **kw)
        matrix, role = load_vprd(path)
        if role != ROLE_SCORES:
            raise ConfigError(
                f"{path} holds descriptors, not scores; "
                f"use kind 'precomputed-descriptors'"
            )
        return cls(id, matrix, **kw)

    @property
    def num_refs(self) -> int:
        return self._matrix.shape[1]

    @property
    def num_queries(self) -> int:
        return self._matrix.shape[0]

    def score(self, q: int) -> np.ndarray:
        self._check_query(q)
        return self._matrix[q]


class PrecomputedDescriptorsProvider(TechniqueProvider):
    """Cosine scores between stored query and reference descriptors."""

    kind = "precomputed-descriptors"

    def __init__(self, id: str, references, queries, cost_estimate_ms: float = 0.0):
        self.id = id
        self.cost_estimate_ms = cost_estimate_ms
        self._refs = np.asarray(references, dtype=np.float64)
        self._queries = np.asarray(queries, dtype=np.float64)
        if self._refs.ndim != 2 or self._queries.ndim != 2:
            raise ShapeMismatch("descriptor matrices must be 2-D")
        if self._refs.shape[1] != self._queries.shape[1]:
            raise ShapeMismatch(
                f"reference dims {self._refs.shape[1]} != "
                f"query dims {self._queries.shape[1]}"
            )
        self._refs.flags.writeable = False
        self._queries.flags.writeable = False

    @classmethod
    def from_files(cls, id: str, ref_path, query_path, **kw):
        refs, _ = load_vprd(ref_path)
        queries, _ = load_vprd(query_path)
        return cls(id, refs, queries, **kw)

    @property
    def num_refs(self) -> int:
        return self._refs.shape[0]

    @property
    def num_queries(self) -> int:
        return self._queries.shape[0]

    def score(self, q: int) -> np.ndarray:
        self._check_query(q)
        return cosine_score_vector(self._queries[q], self._refs)


class HogFolderProvider(TechniqueProvider):
    """Native pipeline: HOG descriptors over two folders of P5 PGM images.

    Frame order is lexicographic filename order. Descriptors are computed
    lazily and cached, so rescoring a past query is free.
    """

    kind = "native-hog"

    def __init__(self, id: str, ref_dir, query_dir,
                 hog: HogConfig | None = None, cost_estimate_ms: float = 0.0):
        self.id = id
        self.cost_estimate_ms = cost_estimate_ms
        self.hog = hog or HogConfig()
        self._ref_paths = sorted(Path(ref_dir).glob("*.pgm"))
        self._query_paths = sorted(Path(query_dir).glob("*.pgm"))
        if not self._ref_paths:
            raise ConfigError(f"{ref_dir}: no .pgm reference images")
        if not self._query_paths:
            raise ConfigError(f"{query_dir}: no .pgm query images")
        self._ref_matrix: np.ndarray | None = None
        self._query_cache: dict[int, np.ndarray] = {}

    @property
    def num_refs(self) -> int:
        return len(self._ref_paths)

    @property
    def num_queries(self) -> int:
        return len(self._query_paths)

    def _references(self) -> np.ndarray:
        if self._ref_matrix is None:
            self._ref_matrix = np.stack(
                [hog_descriptor(load_pgm(p), self.hog) for p in self._ref_paths]
            )
        return self._ref_matrix

    def score(self, q: int) -> np.ndarray:
        self._check_query(q)
        if q not in self._query_cache:
            self._query_cache[q] = hog_descriptor(
                load_pgm(self._query_paths[q]), self.hog
            )
        return cosine_score_vector(self._query_cache[q], self._references())


@dataclass(frozen=True)
class CompetenceSegment:
    """Competence level over [start, end) query frames.

    competence: probability that the true reference carries the peak.
    truth_score: score the true reference receives in incompetent frames;
        None inherits the profile default, 0.0 models a technique with no
        usable signal at all.
    """

    start: int
    end: int
    competence: float
    truth_score: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.competence <= 1.0:
            raise ConfigError(
                f"competence must be in [0, 1], got {self.competence}"
            )
        if self.end <= self.start:
            raise ConfigError(f"empty segment [{self.start}, {self.end})")


@dataclass(frozen=True)
class SyntheticProfile:
    """Condition schedule for a synthetic technique.

    Frames are ground-truth aligned: the true reference of query q is q.
    Each frame gets background noise, a score for the true reference and,
    in incompetent frames, a decoy peak at least ``decoy_min_offset``
    places away from the truth.
    """

    num_queries: int
    num_refs: int
    seed: int
    segments: tuple[CompetenceSegment, ...]
    peak_score: float = 1.0
    truth_score: float = 0.8
    noise_std: float = 0.05
    decoy_min_offset: int = 10

    def __post_init__(self):
        if self.num_refs < self.num_queries:
            raise ConfigError(
                "frame-aligned truth needs num_refs >= num_queries"
            )
        segs = tuple(sorted(self.segments, key=lambda s: s.start))
        object.__setattr__(self, "segments", segs)
        edge = 0
        for seg in segs:
            if seg.start != edge:
                raise ConfigError(
                    f"segments must tile [0, {self.num_queries}) without "
                    f"gaps; hole before frame {seg.start}"
                )
            edge = seg.end
        if edge != self.num_queries:
            raise ConfigError(
                f"segments end at {edge}, expected {self.num_queries}"
            )
        if self.num_refs <= 2 * self.decoy_min_offset + 1:
            raise ConfigError(
                "num_refs too small for the configured decoy_min_offset"
            )

    def segment_at(self, q: int) -> CompetenceSegment:
        for seg in self.segments:
            if seg.start <= q < seg.end:
                return seg
        raise IndexOutOfRange(f"query {q} outside the profile schedule")


class SyntheticProvider(TechniqueProvider):
    """Seeded synthetic technique for benchmarks and property tests.

    Each row is generated from a generator seeded by (profile seed, q),
    so scores do not depend on the order or number of prior calls.
    """

    kind = "synthetic"

    def __init__(self, id: str, profile: SyntheticProfile,
                 cost_estimate_ms: float = 0.0):
        self.id = id
        self.profile = profile
        self.cost_estimate_ms = cost_estimate_ms

    @property
    def num_refs(self) -> int:
        return self.profile.num_refs

    @property
    def num_queries(self) -> int:
        return self.profile.num_queries

    def score(self, q: int) -> np.ndarray:
        self._check_query(q)
        prof = self.profile
        seg = prof.segment_at(q)
        rng = np.random.default_rng([prof.seed, q])
        row = rng.normal(0.0, prof.noise_std, prof.num_refs)
        truth = q
        if rng.random() < seg.competence:
            row[truth] = prof.peak_score
        else:
            truth_score = (
                prof.truth_score if seg.truth_score is None else seg.truth_score
            )
            row[truth] = truth_score
            row[self._decoy(rng, truth)] = prof.peak_score
        return row

    def _decoy(self, rng, truth: int) -> int:
        """Uniform pick among references at least decoy_min_offset away."""
        n, off = self.profile.num_refs, self.profile.decoy_min_offset
        lo = max(0, truth - off + 1)
        hi = min(n, truth + off)
        allowed = n - (hi - lo)
        pick = int(rng.integers(allowed))
        return pick if pick < lo else pick + (hi - lo)


def matrix_from_provider(provider: TechniqueProvider) -> np.ndarray:
    """Materialize every row of a provider as a Q x N matrix."""
    return np.stack([provider.score(q) for q in range(provider.num_queries)])
