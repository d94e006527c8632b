"""Per-frame winner selection, coverage and the static multi-technique run."""

import numpy as np
import pytest

from seqvpr.arbitration import (
    SelectionHistory,
    arbitrate_frame,
    arbitrate_streams,
    coverage,
    coverage_summary,
    run_music_over_dataset,
)
from seqvpr.correction import CorrectionRecord, SicConfig, run_sic_over_dataset
from seqvpr.errors import EmptyWindow, MixedQueryIndices, UnnormalizedStream
from seqvpr.evaluation import GroundTruth
from seqvpr.providers import (
    CompetenceSegment,
    DatasetBundle,
    SyntheticProfile,
    SyntheticProvider,
)
from seqvpr.scores import ScoreStream


def record(q=0, consistency=0.5, match=3, original=3):
    corrected = match != original
    return CorrectionRecord(
        query_index=q,
        original_match=original,
        corrected_match=match,
        correction_magnitude=0.1 if corrected else 0.0,
        winning_consistency=consistency,
        corrected=corrected,
    )


class TestArbitrateFrame:
    def test_single_technique_wins_by_default(self):
        arb = arbitrate_frame({"only": record(consistency=0.2, match=7)})
        assert arb.winner == "only"
        assert arb.prediction == 7
        assert arb.winner_consistency == 0.2

    def test_highest_consistency_wins(self):
        arb = arbitrate_frame({
            "a": record(consistency=0.9, match=1),
            "b": record(consistency=0.4, match=2),
        })
        assert arb.winner == "a"
        assert arb.prediction == 1

    def test_exact_tie_goes_to_registration_order(self):
        records = {
            "a": record(consistency=0.5, match=1),
            "b": record(consistency=0.5, match=2),
        }
        assert arbitrate_frame(records).winner == "a"
        assert arbitrate_frame(records, order=["b", "a"]).winner == "b"

    def test_mixed_query_indices_rejected(self):
        with pytest.raises(MixedQueryIndices):
            arbitrate_frame({
                "a": record(q=3),
                "b": record(q=4),
            })

    def test_winner_consistency_dominates_all(self):
        rng = np.random.default_rng(60)
        for _ in range(50):
            records = {
                f"t{i}": record(consistency=float(rng.normal()), match=i)
                for i in range(5)
            }
            arb = arbitrate_frame(records)
            assert all(
                arb.winner_consistency >= r.winning_consistency
                for r in records.values()
            )


class TestArbitrateStreams:
    def test_rejects_unnormalized_stream(self):
        good = ScoreStream(normalized=True)
        bad = ScoreStream(normalized=False)
        for s in (good, bad):
            s.append([1.0, 0.0, 0.0])
        with pytest.raises(UnnormalizedStream):
            arbitrate_streams({"g": good, "b": bad}, 0, SicConfig())

    def test_matches_manual_correction(self):
        rng = np.random.default_rng(61)
        streams = {}
        for tech in ("x", "y"):
            s = ScoreStream(normalized=True)
            for _ in range(5):
                s.append(rng.normal(size=6))
            streams[tech] = s
        arb = arbitrate_streams(streams, 4, SicConfig(top_k=3, max_lookback=2))
        assert arb.query_index == 4
        assert arb.winner in ("x", "y")


class TestCoverage:
    def test_counting_examples(self):
        assert coverage(["A", "A", "B", "A"]) == {"A": 0.75, "B": 0.25}
        assert coverage(["A"] * 10) == {"A": 1.0}
        cov = coverage(list("ABCDABAABC"))
        assert cov == {"A": 0.4, "B": 0.3, "C": 0.2, "D": 0.1}

    def test_proportions_sum_to_one(self):
        rng = np.random.default_rng(62)
        for _ in range(50):
            wins = [f"t{rng.integers(4)}" for _ in range(int(rng.integers(1, 30)))]
            assert sum(coverage(wins).values()) == pytest.approx(1.0, abs=1e-9)

    def test_explicit_zero_entries(self):
        cov = coverage(["A", "A"], techniques=["A", "B"])
        assert cov == {"A": 1.0, "B": 0.0}

    def test_empty_window_rejected(self):
        with pytest.raises(EmptyWindow):
            coverage([])
        with pytest.raises(EmptyWindow):
            coverage(SelectionHistory(5))

    def test_selection_history_evicts_oldest(self):
        h = SelectionHistory(3)
        for tech in ("a", "b", "c", "d"):
            h.append(tech)
        assert h.items() == ("b", "c", "d")
        assert len(h) == 3


def make_provider(tech_id, seed, segments, q=240, n=240):
    profile = SyntheticProfile(
        num_queries=q, num_refs=n, seed=seed, segments=tuple(segments)
    )
    return SyntheticProvider(tech_id, profile)


CFG = SicConfig(top_k=10, max_lookback=50)


class TestRunMusic:
    def test_single_provider_reduces_to_plain_correction(self):
        provider = make_provider("solo", 70, [CompetenceSegment(0, 240, 0.8)])
        dataset = DatasetBundle(240, GroundTruth(tolerance=1))
        arbs = run_music_over_dataset([provider], dataset, CFG)
        records = run_sic_over_dataset(provider, dataset, CFG)
        assert [a.prediction for a in arbs] == [r.corrected_match for r in records]
        assert all(a.winner == "solo" for a in arbs)

    def test_duplicate_ensemble_prefers_first_registered(self):
        a = make_provider("first", 71, [CompetenceSegment(0, 240, 0.8)])
        b = make_provider("second", 71, [CompetenceSegment(0, 240, 0.8)])
        dataset = DatasetBundle(240, GroundTruth(tolerance=1))
        arbs = run_music_over_dataset([a, b], dataset, CFG)
        assert all(arb.winner == "first" for arb in arbs)
        solo = run_sic_over_dataset(a, dataset, CFG)
        assert [arb.prediction for arb in arbs] == [r.corrected_match for r in solo]

    def test_disjoint_competence_split(self):
        # alpha carries the first half, beta the second.
        alpha = make_provider("alpha", 72, [
            CompetenceSegment(0, 120, 1.0),
            CompetenceSegment(120, 240, 0.0, truth_score=0.0),
        ])
        beta = make_provider("beta", 73, [
            CompetenceSegment(0, 120, 0.0, truth_score=0.0),
            CompetenceSegment(120, 240, 1.0),
        ])
        dataset = DatasetBundle(240, GroundTruth(tolerance=1))
        arbs = run_music_over_dataset([alpha, beta], dataset, CFG)

        first = coverage([a.winner for a in arbs[:120]])
        second = coverage([a.winner for a in arbs[130:]])
        assert first.get("alpha", 0.0) > 0.95
        assert second.get("beta", 0.0) > 0.9

        def acc(preds):
            return float(np.mean([abs(p - q) <= 1 for q, p in enumerate(preds)]))

        music_acc = acc([a.prediction for a in arbs])
        solo_accs = [
            acc([r.corrected_match
                 for r in run_sic_over_dataset(p, dataset, CFG)])
            for p in (alpha, beta)
        ]
        assert music_acc >= max(solo_accs) - 0.02
        assert music_acc >= min(solo_accs) + 0.15

    def test_coverage_summary_keys_every_technique(self):
        a = make_provider("a", 74, [CompetenceSegment(0, 240, 1.0)])
        b = make_provider("b", 75, [CompetenceSegment(0, 240, 0.0, truth_score=0.0)])
        dataset = DatasetBundle(240, GroundTruth(tolerance=1))
        arbs = run_music_over_dataset([a, b], dataset, CFG)
        summary = coverage_summary(arbs)
        assert set(summary) == {"a", "b"}
        assert summary["a"] > 0.9
        assert sum(summary.values()) == pytest.approx(1.0)
