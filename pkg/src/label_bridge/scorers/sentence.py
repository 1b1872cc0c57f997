"""Whole-label embedding similarity metrics."""

import enum

import numpy as np

from ..errors import DataError, DegenerateEmbeddingError


class SentenceMetric(enum.Enum):
    COSINE = "cosine"
    INVERSE_EUCLIDEAN = "inverse_euclidean"


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"embedding dimension mismatch: {u.shape} vs {v.shape}")
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u < 1e-12 or norm_v < 1e-12:
        raise DegenerateEmbeddingError("degenerate embedding: zero norm")
    return float(np.clip(np.dot(u, v) / (norm_u * norm_v), -1.0, 1.0))


def inverse_euclidean(u: np.ndarray, v: np.ndarray) -> float:
    """1 / (1 + ‖u − v‖): bounded to (0, 1], equal to 1 iff u == v."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"embedding dimension mismatch: {u.shape} vs {v.shape}")
    return 1.0 / (1.0 + float(np.linalg.norm(u - v)))


def sentence_similarity(u: np.ndarray, v: np.ndarray, metric: SentenceMetric) -> float:
    if metric is SentenceMetric.COSINE:
        return cosine_similarity(u, v)
    if metric is SentenceMetric.INVERSE_EUCLIDEAN:
        return inverse_euclidean(u, v)
    raise ValueError(f"unknown metric {metric!r}")
