"""Similarity scorers with a common contract.

Every scorer maps a :class:`~label_bridge.dataset.LabelPair` to a
:class:`ScoredPair` carrying an opaque method code and a score inside that
method's declared range:

    MPA          romanized cognate overlap, [0, 1]
    SIM_A/M/I    sub-word embedding alignment (argmax / assignment /
                 iterated argmax), mean selected cosine, [−1, 1]
    SIM_C        mean cosine over the full sub-word matrix, [−1, 1]
    LS_C, LB_C   whole-label cosine for the two sentence models, [−1, 1]
    LS_E, LB_E   whole-label inverse Euclidean distance, (0, 1]

Scores are only comparable within one method code.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from ..dataset import LabelPair
from ..embeddings import CachingEmbeddingProvider, EmbeddingProvider
from ..errors import ConfigError
from ..romanize import RomanizationTables
from .alignment import AlignmentStrategy, SimilarityMatrix, align_subwords
from .cognate import Dictionary, cognate_similarity, levenshtein, levenshtein_similarity
from .sentence import SentenceMetric, cosine_similarity, inverse_euclidean, sentence_similarity
from .subword import build_similarity_matrix, subword_mean_cosine, subword_similarity

SCORER_IDS = ("MPA", "SIM_A", "SIM_M", "SIM_I", "SIM_C", "LS_C", "LS_E", "LB_C", "LB_E")

SCORE_RANGES: dict[str, tuple[float, float]] = {
    "MPA": (0.0, 1.0),
    "SIM_A": (-1.0, 1.0),
    "SIM_M": (-1.0, 1.0),
    "SIM_I": (-1.0, 1.0),
    "SIM_C": (-1.0, 1.0),
    "LS_C": (-1.0, 1.0),
    "LS_E": (0.0, 1.0),
    "LB_C": (-1.0, 1.0),
    "LB_E": (0.0, 1.0),
}

#: Model tags are opaque; the sidecar (or store file) decides what backs them.
DEFAULT_MODEL_TAGS = {"subword": "subword-a", "LS": "sentence-a", "LB": "sentence-b"}

_STRATEGY_IDS = {
    AlignmentStrategy.ARGMAX: "SIM_A",
    AlignmentStrategy.MATCH: "SIM_M",
    AlignmentStrategy.ITERMAX: "SIM_I",
}


@dataclass(frozen=True)
class ScoredPair:
    pair: LabelPair
    scorer_id: str
    score: float

    def __post_init__(self):
        if self.scorer_id not in SCORE_RANGES:
            raise ValueError(f"unknown scorer id {self.scorer_id!r}")
        if not math.isfinite(self.score):
            raise ValueError(f"score for {self.scorer_id} is not finite")
        low, high = SCORE_RANGES[self.scorer_id]
        if not low <= self.score <= high:
            raise ValueError(
                f"score {self.score} outside [{low}, {high}] for {self.scorer_id}"
            )


def score_cognate(
    pair: LabelPair,
    tables: RomanizationTables,
    dictionary: Optional[Dictionary] = None,
) -> ScoredPair:
    return ScoredPair(pair, "MPA", cognate_similarity(pair.label_1, pair.label_2, tables, dictionary))


def score_subword(
    pair: LabelPair,
    provider: EmbeddingProvider,
    strategy: AlignmentStrategy,
    model: str = DEFAULT_MODEL_TAGS["subword"],
    itermax_rounds: int = 2,
) -> ScoredPair:
    score = subword_similarity(
        pair.label_1, pair.label_2, provider, model, strategy, itermax_rounds
    )
    return ScoredPair(pair, _STRATEGY_IDS[strategy], score)


def score_subword_mean_cosine(
    pair: LabelPair,
    provider: EmbeddingProvider,
    model: str = DEFAULT_MODEL_TAGS["subword"],
) -> ScoredPair:
    return ScoredPair(
        pair, "SIM_C", subword_mean_cosine(pair.label_1, pair.label_2, provider, model)
    )


def score_sentence(
    pair: LabelPair,
    provider: EmbeddingProvider,
    metric: SentenceMetric,
    family: str = "LS",
    model: Optional[str] = None,
) -> ScoredPair:
    if family not in ("LS", "LB"):
        raise ValueError(f"unknown sentence scorer family {family!r}")
    model = model or DEFAULT_MODEL_TAGS[family]
    u, v = provider.sentence_vectors([pair.label_1, pair.label_2], model)
    suffix = "C" if metric is SentenceMetric.COSINE else "E"
    return ScoredPair(pair, f"{family}_{suffix}", sentence_similarity(u, v, metric))


class ScorerSuite:
    """A configured set of scorers applied pair by pair.

    Embedding lookups are cached per label, so a suite instance should be
    reused across a whole scoring run.
    """

    def __init__(
        self,
        scorer_ids: Iterable[str],
        *,
        embedding_provider: Optional[EmbeddingProvider] = None,
        tables: Optional[RomanizationTables] = None,
        dictionary: Optional[Dictionary] = None,
        model_tags: Optional[dict[str, str]] = None,
        itermax_rounds: int = 2,
    ):
        ids = list(scorer_ids)
        problems = [f"unknown scorer id {sid!r}" for sid in ids if sid not in SCORE_RANGES]
        if not ids:
            problems.append("no scorers selected")
        if len(set(ids)) != len(ids):
            problems.append("duplicate scorer ids")
        needs_embeddings = [sid for sid in ids if sid != "MPA"]
        if needs_embeddings and embedding_provider is None:
            problems.append(
                f"scorers {', '.join(needs_embeddings)} need an embedding provider"
            )
        if problems:
            raise ConfigError(problems)
        self.scorer_ids = tuple(sorted(ids, key=SCORER_IDS.index))
        self.provider = (
            CachingEmbeddingProvider(embedding_provider) if embedding_provider else None
        )
        self.tables = tables if tables is not None else RomanizationTables.bundled()
        self.dictionary = dictionary
        self.model_tags = {**DEFAULT_MODEL_TAGS, **(model_tags or {})}
        self.itermax_rounds = itermax_rounds

    def score_pair(self, pair: LabelPair) -> list[ScoredPair]:
        out = []
        for sid in self.scorer_ids:
            if sid == "MPA":
                out.append(score_cognate(pair, self.tables, self.dictionary))
            elif sid.startswith("SIM_"):
                model = self.model_tags["subword"]
                if sid == "SIM_C":
                    out.append(score_subword_mean_cosine(pair, self.provider, model))
                else:
                    strategy = {
                        "SIM_A": AlignmentStrategy.ARGMAX,
                        "SIM_M": AlignmentStrategy.MATCH,
                        "SIM_I": AlignmentStrategy.ITERMAX,
                    }[sid]
                    out.append(
                        score_subword(
                            pair, self.provider, strategy, model, self.itermax_rounds
                        )
                    )
            else:
                family, suffix = sid.split("_")
                metric = (
                    SentenceMetric.COSINE if suffix == "C" else SentenceMetric.INVERSE_EUCLIDEAN
                )
                out.append(
                    score_sentence(
                        pair, self.provider, metric, family, self.model_tags[family]
                    )
                )
        return out

    def score_pairs(self, pairs: Iterable[LabelPair]) -> Iterator[ScoredPair]:
        for pair in pairs:
            yield from self.score_pair(pair)
