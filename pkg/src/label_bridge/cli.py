"""Command-line pipeline driver.

Eight subcommands cover the pipeline from dump to evaluation report:

    extract -> rank-langs -> build-dataset -> score -> match -> evaluate
                                        \\-> sample        \\-> report

Each stage reads the previous stage's artifact from the working directory
and writes its own. Exit codes: 0 ok, 1 usage or config problem, 2 data
problem, 3 embedding/language-id service unavailable.
"""

import argparse
import logging
import sys
from collections import Counter, defaultdict
from dataclasses import replace
from pathlib import Path
from typing import Optional

from . import __version__, artifacts
from .artifacts import Provenance
from .config import PipelineConfig, load_config
from .dataset import (
    FilterCriteria,
    compute_language_stats,
    filter_entities,
    generate_pairs,
    select_top_languages,
    verify_label_languages,
)
from .dump_ingest import build_class_graph, classify_and_extract, open_dump, stream_entities
from .embeddings import FileEmbeddingProvider, HttpEmbeddingProvider
from .errors import (
    ConfigError,
    DataError,
    LabelBridgeError,
    MissingArtifactError,
    ProviderUnavailableError,
)
from .evaluation import evaluate as evaluate_matches
from .evaluation import preprocess_pool, required_sample_size, score_reports, stratified_sample
from .langid import FileLanguageIdProvider, HttpLanguageIdProvider
from .matcher import (
    BASELINE_IDS,
    MAIN_LABEL_BASELINE_ID,
    RANDOM_BASELINE_ID,
    greedy_best_match,
    group_scored_pairs,
    main_label_baseline,
    randomized_baseline,
)
from .scorers import SCORER_IDS, ScoredPair, ScorerSuite

logger = logging.getLogger(__name__)

# default artifact file per stage, and the subcommand that produces it
ARTIFACT_FILES = {
    "entities": ("entities.jsonl", "extract"),
    "languages": ("languages.json", "rank-langs"),
    "dataset": ("dataset.tsv", "build-dataset"),
    "scored": ("scored.tsv", "score"),
    "matches": ("matches.tsv", "match"),
    "sample": ("sample.tsv", "sample"),
    "eval_report": ("eval_report.json", "evaluate"),
    "histograms": ("score_histograms.csv", "report"),
    "means": ("language_means.csv", "report"),
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this pipeline reserves 2 for
    data problems, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _workdir(config: PipelineConfig) -> Path:
    path = Path(config.workdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _artifact(config: PipelineConfig, name: str) -> Path:
    return _workdir(config) / ARTIFACT_FILES[name][0]


def _require_artifact(config: PipelineConfig, name: str, override: Optional[str] = None) -> Path:
    if override:
        path = Path(override)
        if not path.exists():
            raise DataError(f"input file not found: {path}")
        return path
    path = _artifact(config, name)
    if not path.exists():
        raise MissingArtifactError(str(path), ARTIFACT_FILES[name][1])
    return path


def _provenance(config: PipelineConfig) -> Provenance:
    return Provenance(config_hash=config.hash(), seed=config.seed)


# --- subcommands --------------------------------------------------------------


def cmd_extract(args, config: PipelineConfig) -> int:
    if not config.dump:
        raise ConfigError(["extract needs a dump path: pass --dump or set 'dump'"])
    with open_dump(config.dump) as lines:
        graph = build_class_graph(stream_entities(lines))
    class_counts: Counter = Counter()

    def tally(records):
        for record in records:
            class_counts[record.entity_class.value] += 1
            yield record

    diagnostics: list = []
    out = _artifact(config, "entities")
    with open_dump(config.dump) as lines:
        raw = stream_entities(lines, diagnostics=diagnostics)
        count = artifacts.write_entity_records(out, tally(classify_and_extract(raw, graph)))
    if diagnostics:
        logger.warning("skipped %d malformed dump lines", len(diagnostics))
    print(f"extracted {count} entities -> {out}")
    for name in sorted(class_counts):
        print(f"  {name}: {class_counts[name]}")
    return 0


def cmd_rank_langs(args, config: PipelineConfig) -> int:
    records = list(artifacts.read_entity_records(_require_artifact(config, "entities")))
    if not records:
        raise DataError("entity file holds no records")
    candidates = config.candidate_languages or sorted(
        {lang for r in records for lang in set(r.labels) | set(r.aliases)}
    )
    stats = compute_language_stats(records, candidates)
    selected = select_top_languages(stats, config.language_count)
    out = _artifact(config, "languages")
    artifacts.write_language_selection(out, stats, selected, _provenance(config))
    chosen = set(selected)
    print(f"{'language':<10} {'coverage':>9} {'presence':>9} {'aliases':>8} {'avg_rank':>9}")
    for s in sorted(stats, key=lambda s: (s.avg_rank, s.language)):
        mark = "  *" if s.language in chosen else ""
        print(
            f"{s.language:<10} {s.main_label_coverage:>9.4f} {s.alias_presence:>9.4f} "
            f"{s.mean_alias_count:>8.3f} {s.avg_rank:>9.3f}{mark}"
        )
    print(f"selected {len(selected)} languages -> {out}")
    return 0


def _langid_provider(config: PipelineConfig):
    if config.skip_langid:
        return None
    if config.langid_url:
        return HttpLanguageIdProvider(config.langid_url)
    if config.langid_file:
        return FileLanguageIdProvider(config.langid_file)
    raise ConfigError(
        ["label verification needs langid_file or langid_url (or pass --skip-langid)"]
    )


def cmd_build_dataset(args, config: PipelineConfig) -> int:
    records = artifacts.read_entity_records(_require_artifact(config, "entities"))
    selected = config.selected_languages or artifacts.read_language_selection(
        _require_artifact(config, "languages")
    )
    criteria = FilterCriteria(
        selected_languages=selected,
        min_languages_with_label=config.min_languages_with_label,
        min_alias_count=config.min_alias_count,
        min_languages_with_aliases=config.min_languages_with_aliases,
    )
    kept = filter_entities(records, criteria)
    provider = _langid_provider(config)
    if provider is not None:
        kept = verify_label_languages(
            kept, provider, config.drop_threshold, config.ambiguity_threshold
        )
    kept = list(kept)
    out = _artifact(config, "dataset")
    count = artifacts.write_dataset(out, generate_pairs(kept, selected), _provenance(config))
    print(f"kept {len(kept)} entities, wrote {count} label pairs -> {out}")
    return 0


def _embedding_provider(config: PipelineConfig):
    if config.embed_url:
        return HttpEmbeddingProvider(config.embed_url)
    if config.vector_store:
        return FileEmbeddingProvider(config.vector_store)
    raise ConfigError(
        ["embedding scorers need a provider: set vector_store or embed_url"]
    )


def cmd_score(args, config: PipelineConfig) -> int:
    pairs = list(artifacts.read_dataset(_require_artifact(config, "dataset", args.input)))
    if not pairs:
        raise DataError("dataset holds no label pairs")
    provider = None
    if any(sid != "MPA" for sid in config.scorers):
        provider = _embedding_provider(config)
    suite = ScorerSuite(
        config.scorers,
        embedding_provider=provider,
        itermax_rounds=config.itermax_rounds,
    )
    out = _artifact(config, "scored")
    count = artifacts.write_scored(out, suite.score_pairs(pairs), _provenance(config))
    print(f"scored {len(pairs)} pairs with {len(suite.scorer_ids)} scorers "
          f"({count} rows) -> {out}")
    return 0


def cmd_match(args, config: PipelineConfig) -> int:
    scored = list(artifacts.read_scored(_require_artifact(config, "scored", args.input)))
    if not scored:
        raise DataError("scored file holds no rows")
    methods = config.effective_methods()
    if MAIN_LABEL_BASELINE_ID in methods:
        # the scored file carries no main-label flags; join them back in
        dataset_path = _require_artifact(config, "dataset", args.dataset)
        mains = {
            p.key: (p.is_main_1, p.is_main_2) for p in artifacts.read_dataset(dataset_path)
        }
        missing = [sp.pair.key for sp in scored if sp.pair.key not in mains]
        if missing:
            raise DataError(
                f"{len(missing)} scored pairs are absent from {dataset_path} "
                f"(first: {missing[0]})"
            )
        scored = [
            ScoredPair(
                replace(sp.pair, is_main_1=mains[sp.pair.key][0], is_main_2=mains[sp.pair.key][1]),
                sp.scorer_id,
                sp.score,
            )
            for sp in scored
        ]
    by_scorer = defaultdict(list)
    for group in group_scored_pairs(scored):
        by_scorer[group.scorer_id].append(group)
    absent = [m for m in methods if m in SCORER_IDS and m not in by_scorer]
    if absent:
        raise DataError(f"scored file has no rows for: {', '.join(absent)}")
    # baselines ignore scores, so any scorer's grouping works; pick one deterministically
    representative = by_scorer[min(by_scorer, key=SCORER_IDS.index)]
    results = []
    for method in methods:
        if method in SCORER_IDS:
            results.extend(greedy_best_match(g) for g in by_scorer[method])
        elif method == RANDOM_BASELINE_ID:
            seed = config.require_seed("the randomized baseline")
            results.extend(randomized_baseline(g, seed) for g in representative)
        elif method == MAIN_LABEL_BASELINE_ID:
            results.extend(main_label_baseline(g) for g in representative)
    out = _artifact(config, "matches")
    count = artifacts.write_matches(out, results, _provenance(config))
    print(f"matched {len(representative)} groups with methods "
          f"{', '.join(methods)} ({count} rows) -> {out}")
    return 0


def cmd_sample(args, config: PipelineConfig) -> int:
    pairs = list(artifacts.read_dataset(_require_artifact(config, "dataset", args.input)))
    if not pairs:
        raise DataError("dataset holds no label pairs")
    seed = config.require_seed("sampling")
    pool = preprocess_pool(pairs, seed, drop_singleton_entities=config.drop_singleton_entities)
    if not pool:
        raise DataError("preprocessing removed every pair; nothing to sample")
    n = required_sample_size(len(pool), config.confidence, config.margin)
    sample = stratified_sample(pool, n, seed)
    out = _artifact(config, "sample")
    artifacts.write_dataset(out, sample, _provenance(config))
    print(
        f"pool {len(pool)} pairs (from {len(pairs)}), target {n} at "
        f"{config.confidence:.0%}±{config.margin:.0%}, sampled {len(sample)} -> {out}"
    )
    return 0


def cmd_evaluate(args, config: PipelineConfig) -> int:
    matches = artifacts.read_matches(_require_artifact(config, "matches", args.matches))
    truth = artifacts.read_truth(Path(args.truth))
    if not truth:
        raise DataError(f"ground-truth file {args.truth} holds no annotations")
    reports = evaluate_matches(matches, truth)
    out = _artifact(config, "eval_report")
    artifacts.write_eval_reports(out, reports, _provenance(config))
    print(artifacts.format_eval_grid(reports))
    print(f"wrote {len(reports)} report rows -> {out}")
    return 0


def cmd_report(args, config: PipelineConfig) -> int:
    scored = artifacts.read_scored(_require_artifact(config, "scored", args.input))
    reports = score_reports(scored)
    hist_out = _artifact(config, "histograms")
    means_out = _artifact(config, "means")
    prov = _provenance(config)
    artifacts.write_histograms_csv(hist_out, reports, prov)
    artifacts.write_language_means_csv(means_out, reports, prov)
    for report in reports:
        print(f"{report.scorer_id}: {report.count} scores")
    print(f"wrote {hist_out} and {means_out}")
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a JSON config file")
    common.add_argument("--workdir", help="artifact directory (default: work)")
    common.add_argument("--seed", type=int, help="seed for stochastic stages")
    common.add_argument("--langid-url", help="language-id service base URL")
    common.add_argument("--embed-url", help="embedding service base URL")
    common.add_argument(
        "--skip-langid",
        action="store_true",
        default=None,
        help="skip language-id verification of labels",
    )
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = _Parser(prog="label-bridge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"label-bridge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", parents=[common], help="dump -> classified entity records")
    p.add_argument("--dump", help="entity dump path (.jsonl or .jsonl.gz)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("rank-langs", parents=[common], help="rank languages, select the top k")
    p.set_defaults(func=cmd_rank_langs)

    p = sub.add_parser("build-dataset", parents=[common], help="filter entities, emit label pairs")
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("score", parents=[common], help="apply configured scorers to pairs")
    p.add_argument("--input", help="pair file to score (default: workdir dataset)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("match", parents=[common], help="select best matches per group")
    p.add_argument("--input", help="scored file (default: workdir scored)")
    p.add_argument("--dataset", help="pair file for main-label flags (default: workdir dataset)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("sample", parents=[common], help="draw a stratified annotation sample")
    p.add_argument("--input", help="pair file to sample from (default: workdir dataset)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evaluate", parents=[common], help="compare matches against ground truth")
    p.add_argument("--truth", required=True, help="ground-truth TSV")
    p.add_argument("--matches", help="match file (default: workdir matches)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", parents=[common], help="score distributions and per-language means")
    p.add_argument("--input", help="scored file (default: workdir scored)")
    p.set_defaults(func=cmd_report)

    return parser


_OVERRIDE_FIELDS = ("dump", "workdir", "seed", "langid_url", "embed_url", "skip_langid")


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        overrides = {
            name: getattr(args, name) for name in _OVERRIDE_FIELDS if hasattr(args, name)
        }
        config = load_config(args.config, overrides=overrides)
        return args.func(args, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ProviderUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LabelBridgeError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
