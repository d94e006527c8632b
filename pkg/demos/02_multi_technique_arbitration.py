#!/usr/bin/env python3
"""Arbitrate two techniques with complementary strengths, frame by frame.

Technique "day" nails the first half of the route and falls apart after;
"night" is the mirror image. Arbitration trusts whichever technique's
corrected candidate shows the strongest sequential consistency, so the
ensemble tracks the competent one through the regime change.
"""

import numpy as np

from seqvpr import (
    CompetenceSegment,
    DatasetBundle,
    GroundTruth,
    SicConfig,
    SyntheticProfile,
    SyntheticProvider,
    coverage,
    run_music_over_dataset,
    run_sic_over_dataset,
)

FRAMES = 300
SWAP = 150


def technique(name, seed, good_first_half):
    competent = CompetenceSegment(0, SWAP, 1.0)
    broken = CompetenceSegment(SWAP, FRAMES, 0.0, truth_score=0.0)
    if not good_first_half:
        competent = CompetenceSegment(SWAP, FRAMES, 1.0)
        broken = CompetenceSegment(0, SWAP, 0.0, truth_score=0.0)
    profile = SyntheticProfile(
        num_queries=FRAMES, num_refs=FRAMES, seed=seed,
        segments=(broken, competent),
    )
    return SyntheticProvider(name, profile)


day = technique("day", seed=7, good_first_half=True)
night = technique("night", seed=8, good_first_half=False)
dataset = DatasetBundle(FRAMES, GroundTruth(tolerance=1))
cfg = SicConfig(top_k=30, max_lookback=FRAMES)


def accuracy(predictions):
    return np.mean([abs(p - q) <= 1 for q, p in enumerate(predictions)])


print("=== single techniques, self-corrected ===")
for provider in (day, night):
    records = run_sic_over_dataset(provider, dataset, cfg)
    acc = accuracy([r.corrected_match for r in records])
    print(f"{provider.id:>6}: accuracy {acc:.3f}")

print()
print("=== the arbitrated ensemble ===")
arbitrations = run_music_over_dataset([day, night], dataset, cfg)
print(f"ensemble accuracy {accuracy([a.prediction for a in arbitrations]):.3f}")

first = coverage([a.winner for a in arbitrations[:SWAP]])
second = coverage([a.winner for a in arbitrations[SWAP:]])
print(f"win share, first half : {first}")
print(f"win share, second half: {second}")
print()
print("Each half is owned by the technique that is competent there, and")
print("the ensemble beats both standalone runs.")
