"""Ground-truth pool construction, sampling, and classification metrics.

The comparison pool is the pair dataset after three fixed-order cleanup
steps (outlier entities, singleton groups, identical-pair downsampling),
sampled per language-pair stratum at a Cochran-derived size. Predictions
are then scored as binary classifiers against annotated best-match flags,
overall and per language.
"""

import logging
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .dataset import LabelPair
from .errors import ConfigError, DataError
from .matcher import BestMatchSet
from .scorers import SCORE_RANGES, ScoredPair

logger = logging.getLogger(__name__)

Z_TABLE = {0.90: 1.645, 0.95: 1.96, 0.99: 2.576}
ALL_SCOPE = "ALL"


@dataclass(frozen=True)
class GroundTruthEntry:
    """A labeled pair; annotations may overlap (several best pairs can
    legally share a label within one group)."""

    pair: LabelPair
    best: bool


@dataclass
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, predicted: bool, actual: bool) -> None:
        if predicted and actual:
            self.tp += 1
        elif predicted and not actual:
            self.fp += 1
        elif not predicted and actual:
            self.fn += 1
        else:
            self.tn += 1

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


@dataclass
class EvalReport:
    """Classification metrics for one method in one scope."""

    method_id: str
    scope: str  # ALL or a language code
    counts: ConfusionCounts = field(default_factory=ConfusionCounts)

    @property
    def support(self) -> int:
        return self.counts.total

    @property
    def accuracy(self) -> float:
        return self.counts.accuracy

    @property
    def precision(self) -> float:
        return self.counts.precision

    @property
    def recall(self) -> float:
        return self.counts.recall

    @property
    def f1(self) -> float:
        return self.counts.f1


def preprocess_pool(
    dataset: Iterable[LabelPair],
    seed: int,
    drop_singleton_entities: bool = False,
) -> list[LabelPair]:
    """Clean the pair pool in three fixed-order steps.

    1. Drop entities whose pair count for any language combination exceeds
       mean + 3·stddev over the entities having that combination.
    2. Drop groups holding a single pair (``drop_singleton_entities=True``
       removes the whole entity instead).
    3. Among entities with at least one identical pair (label_1 equals
       label_2), keep a seeded random half — ceil(k/2) of k.
    """
    pairs = list(dataset)

    group_sizes = Counter(p.group_key for p in pairs)
    by_language_pair: dict[tuple[str, str], list[int]] = defaultdict(list)
    for (entity_id, lang_1, lang_2), count in group_sizes.items():
        by_language_pair[(lang_1, lang_2)].append(count)
    thresholds = {
        lp: float(np.mean(counts)) + 3.0 * float(np.std(counts))
        for lp, counts in by_language_pair.items()
    }
    outliers = {
        entity_id
        for (entity_id, lang_1, lang_2), count in group_sizes.items()
        if count > thresholds[(lang_1, lang_2)]
    }
    if outliers:
        logger.info("pool preprocessing: dropping %d outlier entities", len(outliers))
    pairs = [p for p in pairs if p.entity_id not in outliers]

    sizes = Counter(p.group_key for p in pairs)
    if drop_singleton_entities:
        singleton_entities = {key[0] for key, count in sizes.items() if count == 1}
        pairs = [p for p in pairs if p.entity_id not in singleton_entities]
    else:
        pairs = [p for p in pairs if sizes[p.group_key] > 1]

    identical = sorted({p.entity_id for p in pairs if p.label_1 == p.label_2})
    if identical:
        keep = math.ceil(len(identical) / 2)
        kept = set(random.Random(seed).sample(identical, keep))
        dropped = set(identical) - kept
        logger.info(
            "pool preprocessing: downsampled %d of %d identical-pair entities",
            len(dropped),
            len(identical),
        )
        pairs = [p for p in pairs if p.entity_id not in dropped]
    return pairs


def required_sample_size(population: int, confidence: float, margin: float) -> int:
    """Cochran sample size at worst-case p=0.5, finite-population corrected."""
    if population <= 0:
        raise DataError(f"population must be positive, got {population}")
    problems = []
    if confidence not in Z_TABLE:
        problems.append(f"confidence must be one of {sorted(Z_TABLE)}, got {confidence}")
    if not 0.0 < margin < 1.0:
        problems.append(f"margin must be in (0, 1), got {margin}")
    if problems:
        raise ConfigError(problems)
    z = Z_TABLE[confidence]
    n0 = z * z * 0.25 / (margin * margin)
    n = math.ceil(n0 / (1.0 + (n0 - 1.0) / population))
    return min(n, population)


def allocate_strata(sizes: dict, n: int) -> dict:
    """Equal per-stratum targets, remainder to the largest strata.

    Strata smaller than their share are capped at their size and the
    surplus is redistributed over the rest (with a warning).
    """
    total = sum(sizes.values())
    if n > total:
        raise DataError(f"requested sample {n} exceeds pool size {total}")
    allocation = {stratum: 0 for stratum in sizes}
    active = set(sizes)
    remaining = n
    capped_any = False
    while remaining > 0 and active:
        base, extra = divmod(remaining, len(active))
        ordered = sorted(active, key=lambda s: (-(sizes[s] - allocation[s]), s))
        distributed = 0
        for index, stratum in enumerate(ordered):
            want = base + (1 if index < extra else 0)
            room = sizes[stratum] - allocation[stratum]
            take = min(want, room)
            allocation[stratum] += take
            distributed += take
            if allocation[stratum] == sizes[stratum]:
                active.discard(stratum)
                if want > room:
                    capped_any = True
        if distributed == 0:
            break
        remaining -= distributed
    if capped_any:
        logger.warning(
            "stratified allocation: some strata were smaller than their share; "
            "surplus redistributed"
        )
    return allocation


def stratified_sample(
    pool: Sequence[LabelPair], n: int, seed: int
) -> list[LabelPair]:
    """Sample whole groups per language-pair stratum until each target.

    Strata are unordered language pairs. Inside a stratum, (entity ×
    language pair) groups are drawn in seeded random order until the
    stratum's pair allocation is reached — whole groups, so the matcher
    always sees complete groups. The result can slightly overshoot n at
    group boundaries.
    """
    pool = list(pool)
    strata: dict[tuple[str, str], dict[tuple, list[LabelPair]]] = defaultdict(
        lambda: defaultdict(list)
    )
    for pair in pool:
        strata[(pair.lang_1, pair.lang_2)][pair.group_key].append(pair)
    sizes = {
        lp: sum(len(g) for g in groups.values()) for lp, groups in strata.items()
    }
    allocation = allocate_strata(sizes, n)

    sampled: list[LabelPair] = []
    for lp in sorted(strata):
        target = allocation[lp]
        if target == 0:
            continue
        groups = strata[lp]
        order = sorted(groups)
        rng = random.Random(_stratum_seed(seed, lp))
        rng.shuffle(order)
        taken = 0
        for group_key in order:
            if taken >= target:
                break
            sampled.extend(groups[group_key])
            taken += len(groups[group_key])
    return sampled


def _stratum_seed(seed: int, language_pair: tuple[str, str]) -> int:
    import hashlib

    digest = hashlib.sha256(
        f"{seed}|{language_pair[0]}|{language_pair[1]}".encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "little")


def evaluate(
    matches: Iterable[BestMatchSet], truth: Iterable[GroundTruthEntry]
) -> list[EvalReport]:
    """Binary classification of selections against best-match annotations.

    Every pair of every group (selected or rejected) is one classification
    decision, joined to its annotation on the full 5-tuple. Reports cover
    the ALL scope plus one scope per language, where a pair counts toward
    both of its languages.
    """
    annotations: dict[tuple, bool] = {}
    for entry in truth:
        if entry.pair.key in annotations and annotations[entry.pair.key] != entry.best:
            raise DataError(f"conflicting annotations for {entry.pair.key}")
        annotations[entry.pair.key] = entry.best

    reports: dict[tuple[str, str], EvalReport] = {}

    def report_for(method_id: str, scope: str) -> EvalReport:
        if (method_id, scope) not in reports:
            reports[(method_id, scope)] = EvalReport(method_id, scope)
        return reports[(method_id, scope)]

    missing: list[tuple] = []
    for match in matches:
        for pair, predicted in [(p, True) for p in match.selected] + [
            (p, False) for p in match.rejected
        ]:
            actual = annotations.get(pair.key)
            if actual is None:
                missing.append(pair.key)
                continue
            for scope in (ALL_SCOPE, pair.lang_1, pair.lang_2):
                report_for(match.method_id, scope).counts.add(predicted, actual)
    if missing:
        shown = ", ".join(map(str, missing[:5]))
        raise DataError(
            f"{len(missing)} predicted pairs have no ground-truth row "
            f"(first: {shown})"
        )
    return [
        reports[key]
        for key in sorted(reports, key=lambda k: (k[0], k[1] != ALL_SCOPE, k[1]))
    ]


@dataclass
class ScoreReport:
    """Distribution and per-language means for one scorer's output."""

    scorer_id: str
    bin_edges: np.ndarray  # 101 edges over the scorer's declared range
    density: np.ndarray  # 100 normalized bin densities
    language_means: dict[str, float]
    count: int


def score_reports(scored: Iterable[ScoredPair]) -> list[ScoreReport]:
    """100-bin normalized histograms plus per-language mean scores."""
    values: dict[str, list[float]] = defaultdict(list)
    language_sums: dict[str, Counter] = defaultdict(Counter)
    language_counts: dict[str, Counter] = defaultdict(Counter)
    for sp in scored:
        values[sp.scorer_id].append(sp.score)
        for lang in (sp.pair.lang_1, sp.pair.lang_2):
            language_sums[sp.scorer_id][lang] += sp.score
            language_counts[sp.scorer_id][lang] += 1
    if not values:
        raise DataError("no scored pairs to report on")
    reports = []
    for scorer_id in sorted(values, key=_scorer_sort_key):
        low, high = SCORE_RANGES[scorer_id]
        density, bin_edges = np.histogram(
            values[scorer_id], bins=100, range=(low, high), density=True
        )
        means = {
            lang: language_sums[scorer_id][lang] / language_counts[scorer_id][lang]
            for lang in sorted(language_counts[scorer_id])
        }
        reports.append(
            ScoreReport(scorer_id, bin_edges, density, means, len(values[scorer_id]))
        )
    return reports


def _scorer_sort_key(scorer_id: str):
    ids = list(SCORE_RANGES)
    return (ids.index(scorer_id) if scorer_id in ids else len(ids), scorer_id)
