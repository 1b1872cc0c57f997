"""Benchmark dataset construction from classified entity records.

Four stages, in pipeline order: rank candidate languages by label coverage,
filter entities by label richness over the selected languages, optionally
verify label languages against a language-ID provider, and emit the
cross-lingual label pair dataset.

Language ranking uses a mergeable accumulator so sharded stats equal the
sequential computation exactly.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .dump_ingest import EntityRecord
from .errors import ConfigError, DataError
from .langid import LanguageIdProvider

logger = logging.getLogger(__name__)

DEFAULT_DROP_THRESHOLD = 0.01
DEFAULT_AMBIGUITY_THRESHOLD = 0.5


@dataclass
class LanguageStats:
    """Coverage metrics and ranks for one candidate language."""

    language: str
    main_label_coverage: float
    alias_presence: float
    mean_alias_count: float
    rank_main: int = 0
    rank_presence: int = 0
    rank_mean: int = 0
    avg_rank: float = 0.0


class LanguageStatsAccumulator:
    """Per-language counters with an associative, commutative merge."""

    def __init__(self, candidate_languages: Sequence[str]):
        if not candidate_languages:
            raise ConfigError(["candidate language list is empty"])
        self.languages = tuple(sorted(set(candidate_languages)))
        self.entity_count = 0
        self.label_entities: Counter = Counter()
        self.alias_entities: Counter = Counter()
        self.alias_totals: Counter = Counter()

    def add(self, record: EntityRecord) -> None:
        self.entity_count += 1
        for lang in self.languages:
            if lang in record.labels:
                self.label_entities[lang] += 1
            aliases = record.aliases.get(lang)
            if aliases:
                self.alias_entities[lang] += 1
                self.alias_totals[lang] += len(aliases)

    def merge(self, other: "LanguageStatsAccumulator") -> "LanguageStatsAccumulator":
        if self.languages != other.languages:
            raise ValueError("accumulators cover different language sets")
        out = LanguageStatsAccumulator(self.languages)
        out.entity_count = self.entity_count + other.entity_count
        out.label_entities = self.label_entities + other.label_entities
        out.alias_entities = self.alias_entities + other.alias_entities
        out.alias_totals = self.alias_totals + other.alias_totals
        return out

    def finalize(self) -> list[LanguageStats]:
        if self.entity_count == 0:
            raise DataError("no entities")
        n = self.entity_count
        stats = [
            LanguageStats(
                language=lang,
                main_label_coverage=self.label_entities[lang] / n,
                alias_presence=self.alias_entities[lang] / n,
                mean_alias_count=self.alias_totals[lang] / n,
            )
            for lang in self.languages
        ]
        _assign_ranks(stats)
        return stats


def _assign_ranks(stats: list[LanguageStats]) -> None:
    # competition ranking: rank = 1 + number of strictly greater values,
    # so ties share the smaller rank
    for metric, rank_attr in (
        ("main_label_coverage", "rank_main"),
        ("alias_presence", "rank_presence"),
        ("mean_alias_count", "rank_mean"),
    ):
        values = [getattr(s, metric) for s in stats]
        for s in stats:
            mine = getattr(s, metric)
            setattr(s, rank_attr, 1 + sum(1 for v in values if v > mine))
    for s in stats:
        s.avg_rank = (s.rank_main + s.rank_presence + s.rank_mean) / 3


def compute_language_stats(
    records: Iterable[EntityRecord], candidate_languages: Sequence[str]
) -> list[LanguageStats]:
    """Coverage, alias presence, and mean alias count per candidate language."""
    acc = LanguageStatsAccumulator(candidate_languages)
    for record in records:
        acc.add(record)
    return acc.finalize()


def select_top_languages(stats: Sequence[LanguageStats], k: int) -> list[str]:
    """The ``k`` languages with the smallest average rank, ties by code."""
    if k > len(stats):
        raise ConfigError([f"requested {k} languages but only {len(stats)} ranked"])
    ordered = sorted(stats, key=lambda s: (s.avg_rank, s.language))
    return [s.language for s in ordered[:k]]


@dataclass
class FilterCriteria:
    """Label-richness thresholds applied over the selected languages."""

    selected_languages: Sequence[str]
    min_languages_with_label: int = 4
    min_alias_count: int = 3
    min_languages_with_aliases: int = 3

    def validate(self) -> None:
        problems = []
        if not self.selected_languages:
            problems.append("selected_languages is empty")
        if len(set(self.selected_languages)) != len(self.selected_languages):
            problems.append("selected_languages contains duplicates")
        for name in ("min_languages_with_label", "min_alias_count", "min_languages_with_aliases"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if problems:
            raise ConfigError(problems)


def filter_entities(
    records: Iterable[EntityRecord], criteria: FilterCriteria
) -> Iterator[EntityRecord]:
    """Keep entities rich enough in the selected languages.

    An entity passes iff it has a main label in at least
    ``min_languages_with_label`` selected languages and at least
    ``min_alias_count`` aliases in each of at least
    ``min_languages_with_aliases`` selected languages. Labels in unselected
    languages are dropped from kept records.
    """
    criteria.validate()
    selected = set(criteria.selected_languages)
    for record in records:
        labels = {l: v for l, v in record.labels.items() if l in selected}
        if len(labels) < criteria.min_languages_with_label:
            continue
        aliases = {l: list(v) for l, v in record.aliases.items() if l in selected}
        rich = sum(1 for v in aliases.values() if len(v) >= criteria.min_alias_count)
        if rich < criteria.min_languages_with_aliases:
            continue
        yield EntityRecord(record.id, record.entity_class, labels, aliases)


def verify_label_languages(
    records: Iterable[EntityRecord],
    langid: LanguageIdProvider,
    drop_threshold: float = DEFAULT_DROP_THRESHOLD,
    ambiguity_threshold: float = DEFAULT_AMBIGUITY_THRESHOLD,
) -> Iterator[EntityRecord]:
    """Drop labels whose detected language contradicts their assigned one.

    A label is dropped iff the detector puts probability below
    ``drop_threshold`` on the assigned language AND is confident about some
    language (max probability >= ``ambiguity_threshold``). Ambiguous labels
    are kept.
    """
    for record in records:
        items: list[tuple[str, str]] = []
        for lang in record.labels:
            items.append((lang, record.labels[lang]))
        for lang, values in record.aliases.items():
            items.extend((lang, v) for v in values)
        if not items:
            yield record
            continue
        distributions = langid.probabilities_batch([text for _, text in items])
        verdicts = {
            (lang, text): _keep_label(lang, dist, drop_threshold, ambiguity_threshold)
            for (lang, text), dist in zip(items, distributions)
        }
        labels = {
            lang: text for lang, text in record.labels.items() if verdicts[(lang, text)]
        }
        aliases = {}
        for lang, values in record.aliases.items():
            kept = [v for v in values if verdicts[(lang, v)]]
            if kept:
                aliases[lang] = kept
        dropped = len(items) - len(labels) - sum(len(v) for v in aliases.values())
        if dropped:
            logger.debug("entity %s: dropped %d mislabeled strings", record.id, dropped)
        yield EntityRecord(record.id, record.entity_class, labels, aliases)


def _keep_label(
    assigned: str, dist: dict[str, float], drop_threshold: float, ambiguity_threshold: float
) -> bool:
    if not dist:
        return True
    top = max(dist.values())
    return not (dist.get(assigned, 0.0) < drop_threshold and top >= ambiguity_threshold)


@dataclass(frozen=True, order=True)
class LabelPair:
    """One cross-lingual label pairing of a single entity.

    The language pair is stored in canonical (lexicographic) order so every
    unordered pairing appears exactly once dataset-wide.
    """

    entity_id: str
    lang_1: str
    lang_2: str
    label_1: str
    label_2: str
    is_main_1: bool = field(compare=False, default=False)
    is_main_2: bool = field(compare=False, default=False)

    def __post_init__(self):
        if self.lang_1 >= self.lang_2:
            raise ValueError(
                f"language pair ({self.lang_1}, {self.lang_2}) not in canonical order"
            )

    @classmethod
    def canonical(
        cls,
        entity_id: str,
        lang_a: str,
        label_a: str,
        is_main_a: bool,
        lang_b: str,
        label_b: str,
        is_main_b: bool,
    ) -> "LabelPair":
        if lang_a > lang_b:
            lang_a, label_a, is_main_a, lang_b, label_b, is_main_b = (
                lang_b,
                label_b,
                is_main_b,
                lang_a,
                label_a,
                is_main_a,
            )
        return cls(entity_id, lang_a, lang_b, label_a, label_b, is_main_a, is_main_b)

    @property
    def key(self) -> tuple[str, str, str, str, str]:
        return (self.entity_id, self.lang_1, self.lang_2, self.label_1, self.label_2)

    @property
    def group_key(self) -> tuple[str, str, str]:
        return (self.entity_id, self.lang_1, self.lang_2)


def generate_pairs(
    records: Iterable[EntityRecord], selected_languages: Sequence[str]
) -> Iterator[LabelPair]:
    """Cross product of labels per entity and unordered language pair.

    For each entity and each language pair (L1 < L2) where both sides have
    at least one label, every (main or alias) label of L1 is paired with
    every label of L2.
    """
    languages = sorted(set(selected_languages))
    for record in records:
        present = [lang for lang in languages if record.all_labels(lang)]
        for lang_1, lang_2 in itertools.combinations(present, 2):
            side_1 = record.all_labels(lang_1)
            side_2 = record.all_labels(lang_2)
            for i, label_1 in enumerate(side_1):
                for j, label_2 in enumerate(side_2):
                    yield LabelPair(
                        entity_id=record.id,
                        lang_1=lang_1,
                        lang_2=lang_2,
                        label_1=label_1,
                        label_2=label_2,
                        is_main_1=i == 0 and lang_1 in record.labels,
                        is_main_2=j == 0 and lang_2 in record.labels,
                    )


def language_presence_correlation(
    records: Sequence[EntityRecord], languages: Sequence[str]
) -> dict[tuple[str, str], float]:
    """Pearson correlation of has-any-label indicators per language pair."""
    import numpy as np

    if len(records) < 2:
        raise DataError("need at least two entities for a correlation")
    langs = sorted(set(languages))
    indicators = np.array(
        [[1.0 if r.all_labels(lang) else 0.0 for lang in langs] for r in records]
    )
    out: dict[tuple[str, str], float] = {}
    with np.errstate(invalid="ignore"):
        corr = np.corrcoef(indicators, rowvar=False)
    for i, j in itertools.combinations(range(len(langs)), 2):
        out[(langs[i], langs[j])] = float(corr[i, j])
    return out
