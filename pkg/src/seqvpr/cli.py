"""Command-line front end.

Subcommands:
    run      execute a pipeline described by a JSON config
    synth    generate a synthetic benchmark (score files + run config)
    eval     recompute the metrics report from a prediction log
    convert  translate score matrices between CSV and VPRD

Exit codes: 0 success, 2 configuration error (the message names the
field), 3 data error, 1 internal error. All paths inside a config file
resolve relative to that file. Outputs contain no timestamps, so two
identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import adaptive, arbitration, correction, evaluation
from .errors import ConfigError, DataError, SeqVprError
from .evaluation import EXPLICIT, FRAME_ALIGNED, GroundTruth, PredictionLog
from .io import (
    ROLE_SCORES,
    load_score_csv,
    load_vprd,
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
    matrix_from_provider,
)

PIPELINES = ("baseline", "sic", "music", "amusic")


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{field}: {message}")


def _ground_truth_from_spec(spec, field: str = "ground_truth") -> GroundTruth:
    _require(isinstance(spec, dict), field, "must be an object")
    mode = spec.get("mode", FRAME_ALIGNED)
    _require(mode in (FRAME_ALIGNED, EXPLICIT), f"{field}.mode",
             f"must be '{FRAME_ALIGNED}' or '{EXPLICIT}'")
    tolerance = spec.get("tolerance", 0)
    _require(isinstance(tolerance, int) and tolerance >= 0,
             f"{field}.tolerance", "must be a non-negative integer")
    mapping = None
    if mode == EXPLICIT:
        raw = spec.get("mapping")
        _require(isinstance(raw, dict) and raw, f"{field}.mapping",
                 "explicit mode needs a non-empty mapping")
        mapping = {
            int(q): tuple((int(lo), int(hi)) for lo, hi in ranges)
            for q, ranges in raw.items()
        }
    return GroundTruth(mode=mode, tolerance=tolerance, mapping=mapping)


def _sic_config_from_spec(spec) -> correction.SicConfig:
    spec = spec or {}
    top_k = spec.get("top_k", 50)
    lookback = spec.get("max_lookback", 1000)
    _require(isinstance(top_k, int) and top_k >= 1, "sic.top_k",
             "must be an integer >= 1")
    _require(isinstance(lookback, int) and lookback >= 0, "sic.max_lookback",
             "must be an integer >= 0")
    return correction.SicConfig(
        top_k=top_k,
        max_lookback=lookback,
        include_current=bool(spec.get("include_current", True)),
    )


def _adaptive_config_from_spec(spec, sic: correction.SicConfig) -> adaptive.AdaptiveConfig:
    spec = spec or {}
    threshold = spec.get("coverage_threshold", 0.7)
    window = spec.get("window", 10)
    alpha = spec.get("alpha", 0.05)
    _require(
        isinstance(threshold, (int, float)) and 0.0 < threshold <= 1.0,
        "adaptive.coverage_threshold", "must be in (0, 1]",
    )
    _require(isinstance(window, int) and window >= 2, "adaptive.window",
             "must be an integer >= 2")
    _require(
        isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0,
        "adaptive.alpha", "must be in (0, 1)",
    )
    return adaptive.AdaptiveConfig(
        coverage_threshold=float(threshold),
        window=window,
        alpha=float(alpha),
        sic=sic,
    )


def _synthetic_profile_from_spec(spec, field: str, num_queries: int,
                                 num_refs: int, seed: int) -> SyntheticProfile:
    segments = spec.get("segments")
    _require(isinstance(segments, list) and segments, f"{field}.segments",
             "must be a non-empty list")
    segs = []
    for i, seg in enumerate(segments):
        _require(isinstance(seg, dict), f"{field}.segments[{i}]",
                 "must be an object")
        segs.append(CompetenceSegment(
            start=int(seg.get("start", 0)),
            end=int(seg.get("end", num_queries)),
            competence=float(seg["competence"]),
            truth_score=(
                float(seg["truth_score"]) if "truth_score" in seg else None
            ),
        ))
    return SyntheticProfile(
        num_queries=num_queries,
        num_refs=num_refs,
        seed=int(spec.get("seed", seed)),
        segments=tuple(segs),
        peak_score=float(spec.get("peak_score", 1.0)),
        truth_score=float(spec.get("truth_score", 0.8)),
        noise_std=float(spec.get("noise_std", 0.05)),
        decoy_min_offset=int(spec.get("decoy_min_offset", 10)),
    )


def _build_provider(spec, index: int, base: Path, seed: int):
    field = f"techniques[{index}]"
    _require(isinstance(spec, dict), field, "must be an object")
    tech_id = spec.get("id")
    _require(isinstance(tech_id, str) and tech_id, f"{field}.id",
             "must be a non-empty string")
    kind = spec.get("kind")
    if kind == "precomputed-scores":
        _require("path" in spec, f"{field}.path", "required for this kind")
        return PrecomputedScoresProvider.from_file(
            tech_id, base / spec["path"]
        )
    if kind == "precomputed-descriptors":
        for key in ("references", "queries"):
            _require(key in spec, f"{field}.{key}", "required for this kind")
        return PrecomputedDescriptorsProvider.from_files(
            tech_id, base / spec["references"], base / spec["queries"]
        )
    if kind == "native-hog":
        for key in ("references", "queries"):
            _require(key in spec, f"{field}.{key}", "required for this kind")
        return HogFolderProvider(
            tech_id, base / spec["references"], base / spec["queries"]
        )
    if kind == "synthetic":
        _require("num_queries" in spec, f"{field}.num_queries",
                 "required for this kind")
        _require("num_refs" in spec, f"{field}.num_refs",
                 "required for this kind")
        profile = _synthetic_profile_from_spec(
            spec, field, int(spec["num_queries"]), int(spec["num_refs"]), seed
        )
        return SyntheticProvider(tech_id, profile)
    raise ConfigError(
        f"{field}.kind: unknown kind {kind!r} (expected precomputed-scores, "
        f"precomputed-descriptors, native-hog or synthetic)"
    )


def _load_json(path: Path, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise DataError(f"{what} not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} {path} is not valid JSON: {exc}") from exc


def _write_predictions_csv(path: Path, log: PredictionLog,
                           ensemble_size: int, reselections: int) -> None:
    with open(path, "w") as fh:
        fh.write(f"# ensemble_size={ensemble_size}\n")
        fh.write(f"# reselections={reselections}\n")
        fh.write("query_index,prediction,confidence,technique,technique_count\n")
        for q in range(len(log)):
            fh.write(
                f"{q},{log.predictions[q]},{log.confidences[q]!r},"
                f"{log.techniques[q]},{log.technique_counts[q]}\n"
            )


def _read_predictions_csv(path: Path) -> tuple[PredictionLog, int, int]:
    log = PredictionLog()
    ensemble_size, reselections = 1, 0
    try:
        lines = Path(path).read_text().splitlines()
    except FileNotFoundError:
        raise DataError(f"prediction log not found: {path}") from None
    body = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line.lstrip("# ").partition("=")
            if key == "ensemble_size":
                ensemble_size = int(value)
            elif key == "reselections":
                reselections = int(value)
            continue
        body.append(line)
    if not body or not body[0].startswith("query_index"):
        raise DataError(f"{path}: missing prediction log header")
    for line in body[1:]:
        parts = line.split(",")
        if len(parts) != 5:
            raise DataError(f"{path}: malformed row {line!r}")
        log.append(int(parts[1]), float(parts[2]), int(parts[4]), parts[3])
    if len(log) == 0:
        raise DataError(f"{path}: prediction log has no rows")
    return log, ensemble_size, reselections


def _run_pipeline(pipeline, providers, dataset, sic_cfg, adaptive_cfg, out: Path):
    """Execute one pipeline, streaming its per-frame logs as they happen.

    Line-buffered log files mean an aborted run still leaves an
    analyzable prefix on disk. Returns (prediction log, reselections).
    """
    log = PredictionLog()
    reselections = 0
    if pipeline == "baseline":
        provider = providers[0]
        for q in range(dataset.num_queries):
            row = provider.score(q)
            best = int(np.argmax(row))
            log.append(best, float(row[best]), 1, provider.id)
    elif pipeline == "sic":
        provider = providers[0]
        with open(out / "corrections.csv", "w", buffering=1) as fh:
            fh.write(correction.CORRECTION_LOG_HEADER + "\n")
            for r in correction.iter_sic_over_dataset(provider, dataset, sic_cfg):
                correction.write_correction_row(r, fh)
                log.append(r.corrected_match, r.winning_consistency, 1,
                           provider.id)
    elif pipeline == "music":
        order = [p.id for p in providers]
        winners = []
        with open(out / "arbitration.csv", "w", buffering=1) as fh:
            arbitration.write_arbitration_header(order, fh)
            for a in arbitration.iter_music_over_dataset(providers, dataset,
                                                         sic_cfg):
                arbitration.write_arbitration_row(a, order, fh)
                winners.append(a.winner)
                log.append(a.prediction, a.winner_consistency,
                           len(providers), a.winner)
        with open(out / "coverage.json", "w") as fh:
            cov = arbitration.coverage(winners, techniques=order)
            json.dump(cov, fh, sort_keys=True)
            fh.write("\n")
    else:  # amusic
        engine = adaptive.AdaptiveEnsemble(providers, adaptive_cfg)
        steps = []
        with open(out / "events.jsonl", "w", buffering=1) as fh:
            for _ in range(dataset.num_queries):
                step = engine.step()
                steps.append(step)
                adaptive.write_step_record(step, fh)
                for event in step.events:
                    adaptive.write_reselection_record(event, fh)
        reselections = len(engine.events)
        # technique counts are only final after the run: re-selections
        # retroactively charge the whole ensemble for rescored frames
        for step, count in zip(steps, engine.technique_run_counts):
            log.append(step.prediction, step.consistency, count, step.technique)
    return log, reselections


def cmd_run(args) -> int:
    config_path = Path(args.config)
    config = _load_json(config_path, "config")
    base = config_path.parent

    pipeline = config.get("pipeline")
    _require(pipeline in PIPELINES, "pipeline",
             f"must be one of {', '.join(PIPELINES)}")
    techniques = config.get("techniques")
    _require(isinstance(techniques, list) and techniques, "techniques",
             "must be a non-empty list")
    if pipeline in ("baseline", "sic"):
        _require(len(techniques) == 1, "techniques",
                 f"pipeline '{pipeline}' takes exactly one technique")
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    _require(isinstance(seed, int), "seed", "must be an integer")

    sic_cfg = _sic_config_from_spec(config.get("sic"))
    adaptive_cfg = _adaptive_config_from_spec(config.get("adaptive"), sic_cfg)
    gt = _ground_truth_from_spec(config.get("ground_truth", {}))

    providers = [
        _build_provider(spec, i, base, seed)
        for i, spec in enumerate(techniques)
    ]
    ids = [p.id for p in providers]
    _require(len(set(ids)) == len(ids), "techniques", "ids must be unique")
    counts = {p.num_queries for p in providers}
    if len(counts) != 1:
        raise DataError(
            f"techniques disagree on query count: {sorted(counts)}"
        )
    refs = {p.num_refs for p in providers}
    if len(refs) != 1:
        raise DataError(
            f"techniques disagree on reference count: {sorted(refs)}"
        )

    dataset = DatasetBundle(num_queries=counts.pop(), ground_truth=gt)
    out = Path(args.out) if args.out else base / config.get("output_dir", "out")
    out.mkdir(parents=True, exist_ok=True)

    log, reselections = _run_pipeline(
        pipeline, providers, dataset, sic_cfg, adaptive_cfg, out
    )
    _write_predictions_csv(out / "predictions.csv", log, len(providers),
                           reselections)
    report = evaluation.evaluate(log, gt, len(providers), reselections)
    with open(out / "report.json", "w") as fh:
        evaluation.write_report_json(report, fh)
    with open(out / "pr_curve.csv", "w") as fh:
        evaluation.write_pr_csv(report.pr_points, fh)
    if not args.quiet:
        print(
            f"{pipeline}: accuracy={report.accuracy:.4f} "
            f"auc={report.auc:.4f} ptr={report.ptr:.4f} "
            f"reselections={report.reselection_count}"
        )
    return 0


def cmd_synth(args) -> int:
    profile_path = Path(args.profile)
    profile = _load_json(profile_path, "profile")
    out = Path(args.out)

    num_queries = profile.get("num_queries")
    num_refs = profile.get("num_refs")
    _require(isinstance(num_queries, int) and num_queries > 0, "num_queries",
             "must be a positive integer")
    _require(isinstance(num_refs, int) and num_refs > 0, "num_refs",
             "must be a positive integer")
    seed = args.seed if args.seed is not None else profile.get("seed", 0)
    techniques = profile.get("techniques")
    _require(isinstance(techniques, list) and techniques, "techniques",
             "must be a non-empty list")

    out.mkdir(parents=True, exist_ok=True)
    tech_entries = []
    for i, spec in enumerate(techniques):
        field = f"techniques[{i}]"
        _require(isinstance(spec, dict), field, "must be an object")
        tech_id = spec.get("id")
        _require(isinstance(tech_id, str) and tech_id, f"{field}.id",
                 "must be a non-empty string")
        synth_profile = _synthetic_profile_from_spec(
            spec, field, num_queries, num_refs, seed + i
        )
        provider = SyntheticProvider(tech_id, synth_profile)
        matrix = matrix_from_provider(provider)
        filename = f"{tech_id}.vprd"
        save_vprd(out / filename, matrix, ROLE_SCORES)
        tech_entries.append(
            {"id": tech_id, "kind": "precomputed-scores", "path": filename}
        )

    gt_spec = profile.get(
        "ground_truth", {"mode": FRAME_ALIGNED, "tolerance": 1}
    )
    _ground_truth_from_spec(gt_spec)  # validate before writing
    run_config = {
        "pipeline": profile.get("pipeline", "amusic"),
        "techniques": tech_entries,
        "sic": profile.get("sic", {"top_k": 50, "max_lookback": 1000}),
        "adaptive": profile.get(
            "adaptive",
            {"coverage_threshold": 0.7, "window": 10, "alpha": 0.05},
        ),
        "ground_truth": gt_spec,
        "output_dir": "out",
        "seed": seed,
    }
    _require(run_config["pipeline"] in PIPELINES, "pipeline",
             f"must be one of {', '.join(PIPELINES)}")
    with open(out / "run_config.json", "w") as fh:
        json.dump(run_config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / "ground_truth.json", "w") as fh:
        json.dump(gt_spec, fh, sort_keys=True)
        fh.write("\n")
    if not args.quiet:
        print(f"wrote {len(tech_entries)} score files + run_config.json to {out}")
    return 0


def cmd_eval(args) -> int:
    log, ensemble_size, reselections = _read_predictions_csv(Path(args.log))
    gt = _ground_truth_from_spec(_load_json(Path(args.gt), "ground truth"))
    if args.ensemble_size is not None:
        ensemble_size = args.ensemble_size
    report = evaluation.evaluate(log, gt, ensemble_size, reselections)
    json.dump(report.to_json_dict(), sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def cmd_convert(args) -> int:
    src, dst = Path(args.src), Path(args.dst)
    if not src.exists():
        raise DataError(f"input file not found: {src}")
    if src.suffix.lower() == ".csv" and dst.suffix.lower() == ".vprd":
        save_vprd(dst, load_score_csv(src), ROLE_SCORES)
    elif src.suffix.lower() == ".vprd" and dst.suffix.lower() == ".csv":
        matrix, _ = load_vprd(src)
        save_score_csv(dst, matrix)
    else:
        raise ConfigError(
            "convert: expected a .csv->.vprd or .vprd->.csv pair, "
            f"got {src.name} -> {dst.name}"
        )
    if not args.quiet:
        print(f"wrote {dst}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqvpr",
        description="Sequence-consistency place recognition pipelines",
    )
    parser.add_argument("--quiet", action="store_true",
                        help="suppress the summary line")
    # accepted after the subcommand too; SUPPRESS keeps the subparser from
    # clobbering an already-parsed top-level --quiet
    quiet = argparse.ArgumentParser(add_help=False)
    quiet.add_argument("--quiet", action="store_true",
                       default=argparse.SUPPRESS,
                       help="suppress the summary line")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[quiet],
                           help="execute a pipeline from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", help="override the config's output_dir")
    p_run.add_argument("--seed", type=int, help="override the config's seed")
    p_run.set_defaults(func=cmd_run)

    p_synth = sub.add_parser("synth", parents=[quiet],
                             help="generate a synthetic benchmark")
    p_synth.add_argument("profile", help="synthetic profile JSON")
    p_synth.add_argument("out", help="output directory")
    p_synth.add_argument("--seed", type=int, help="override the profile's seed")
    p_synth.set_defaults(func=cmd_synth)

    p_eval = sub.add_parser("eval", parents=[quiet],
                            help="re-evaluate a prediction log")
    p_eval.add_argument("log", help="predictions.csv from a run")
    p_eval.add_argument("gt", help="ground-truth spec JSON")
    p_eval.add_argument("--ensemble-size", type=int, dest="ensemble_size")
    p_eval.set_defaults(func=cmd_eval)

    p_conv = sub.add_parser("convert", parents=[quiet],
                            help="convert CSV <-> VPRD score files")
    p_conv.add_argument("src")
    p_conv.add_argument("dst")
    p_conv.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except SeqVprError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
