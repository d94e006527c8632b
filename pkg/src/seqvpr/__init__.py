"""Sequence-consistency visual place recognition.

Streaming place recognition built from four layers:

- per-vector z-normalized score streams (:mod:`seqvpr.scores`)
- single-technique match correction by diagonal consistency
  (:mod:`seqvpr.correction`)
- per-frame arbitration across techniques (:mod:`seqvpr.arbitration`)
- an adaptive controller that runs the smallest technique subset that
  still covers the traffic and re-selects when a paired t test flags a
  shift in correction behaviour (:mod:`seqvpr.adaptive`)

plus providers, file formats, a benchmark metrics suite and a CLI.
"""

from .adaptive import (
    AdaptiveConfig,
    AdaptiveEnsemble,
    AdaptiveRun,
    EnsembleState,
    ReselectionEvent,
    StepResult,
    run_amusic_over_dataset,
    select_subset,
    window_correction_vector,
)
from .arbitration import (
    FrameArbitration,
    SelectionHistory,
    arbitrate_frame,
    arbitrate_streams,
    coverage,
    coverage_summary,
    iter_music_over_dataset,
    run_music_over_dataset,
)
from .correction import (
    CorrectionRecord,
    SicConfig,
    consistency_score,
    correct_query,
    iter_sic_over_dataset,
    run_sic_over_dataset,
    top_candidates,
)
from .evaluation import (
    EvalReport,
    GroundTruth,
    PredictionLog,
    PrPoint,
    accuracy,
    auc,
    evaluate,
    is_correct,
    pr_curve,
    ptr,
)
from .hog import HogConfig, bilinear_resize, hog_descriptor
from .io import (
    ROLE_DESCRIPTORS,
    ROLE_SCORES,
    load_pgm,
    load_score_csv,
    load_vprd,
    save_pgm,
    save_score_csv,
    save_vprd,
)
from .providers import (
    CompetenceSegment,
    DatasetBundle,
    HogFolderProvider,
    PrecomputedDescriptorsProvider,
    PrecomputedScoresProvider,
    SyntheticProfile,
    SyntheticProvider,
    TechniqueProvider,
    cosine_score_vector,
    matrix_from_provider,
)
from .scores import (
    NormalizationParams,
    ScoreStream,
    as_score_vector,
    normalize_scores,
)
from .stats import (
    PairedTestResult,
    paired_t_test,
    regularized_incomplete_beta,
    student_t_two_tailed_p,
)

__version__ = "0.1.0"
