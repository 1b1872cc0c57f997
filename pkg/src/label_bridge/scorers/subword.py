"""Sub-word embedding scores: strategy-filtered and mean-cosine variants."""

import numpy as np

from ..embeddings import EmbeddingProvider
from .alignment import AlignmentStrategy, SimilarityMatrix, align_subwords


def build_similarity_matrix(
    label_1: str, label_2: str, provider: EmbeddingProvider, model: str
) -> SimilarityMatrix:
    (tokens_1, vectors_1), (tokens_2, vectors_2) = provider.subword_vectors(
        [label_1, label_2], model
    )
    return SimilarityMatrix.from_vectors(tokens_1, vectors_1, tokens_2, vectors_2)


def subword_similarity(
    label_1: str,
    label_2: str,
    provider: EmbeddingProvider,
    model: str,
    strategy: AlignmentStrategy,
    itermax_rounds: int = 2,
) -> float:
    """Mean cosine over the cells selected by the alignment strategy."""
    matrix = build_similarity_matrix(label_1, label_2, provider, model)
    cells = align_subwords(matrix, strategy, itermax_rounds=itermax_rounds)
    if not cells:
        return 0.0
    values = matrix.values
    mean = float(np.mean([values[i, j] for i, j in cells]))
    return float(np.clip(mean, -1.0, 1.0))


def subword_mean_cosine(
    label_1: str, label_2: str, provider: EmbeddingProvider, model: str
) -> float:
    """Mean cosine over every cell of the similarity matrix."""
    matrix = build_similarity_matrix(label_1, label_2, provider, model)
    return float(np.clip(float(np.mean(matrix.values)), -1.0, 1.0))
