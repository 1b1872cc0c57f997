"""Sub-word alignment strategies over a cosine similarity matrix.

Three selection rules with different strictness: mutual argmax (high
precision), maximum-weight bipartite assignment (complete matching), and
iterated mutual argmax on the shrinking unmatched submatrix.
"""

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .. import errors


class AlignmentStrategy(enum.Enum):
    ARGMAX = "argmax"
    MATCH = "match"
    ITERMAX = "itermax"


@dataclass
class SimilarityMatrix:
    """Pairwise cosine similarities between two labels' sub-word units."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    values: np.ndarray

    @classmethod
    def from_vectors(
        cls,
        row_tokens: Sequence[str],
        row_vectors: np.ndarray,
        col_tokens: Sequence[str],
        col_vectors: np.ndarray,
    ) -> "SimilarityMatrix":
        row_vectors = np.asarray(row_vectors, dtype=np.float64)
        col_vectors = np.asarray(col_vectors, dtype=np.float64)
        if row_vectors.shape[1] != col_vectors.shape[1]:
            raise errors.DataError(
                f"embedding dimension mismatch: {row_vectors.shape[1]} vs "
                f"{col_vectors.shape[1]}"
            )
        row_norms = np.linalg.norm(row_vectors, axis=1)
        col_norms = np.linalg.norm(col_vectors, axis=1)
        if (row_norms < 1e-12).any() or (col_norms < 1e-12).any():
            raise errors.DegenerateEmbeddingError("degenerate embedding: zero norm")
        values = (row_vectors @ col_vectors.T) / np.outer(row_norms, col_norms)
        np.clip(values, -1.0, 1.0, out=values)
        return cls(tuple(row_tokens), tuple(col_tokens), values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def align_subwords(
    matrix: SimilarityMatrix | np.ndarray,
    strategy: AlignmentStrategy,
    itermax_rounds: int = 2,
) -> set[tuple[int, int]]:
    """Aligned (row, col) cells under the given strategy.

    Argmax and Itermax produce one-to-one sets by construction; Match is a
    complete maximum-weight matching of size min(rows, cols).
    """
    values = matrix.values if isinstance(matrix, SimilarityMatrix) else np.asarray(matrix)
    if values.size == 0:
        return set()
    if strategy is AlignmentStrategy.ARGMAX:
        return _mutual_argmax(values)
    if strategy is AlignmentStrategy.MATCH:
        rows, cols = linear_sum_assignment(values, maximize=True)
        return set(zip(rows.tolist(), cols.tolist()))
    if strategy is AlignmentStrategy.ITERMAX:
        return _itermax(values, itermax_rounds)
    raise ValueError(f"unknown strategy {strategy!r}")


def _mutual_argmax(values: np.ndarray) -> set[tuple[int, int]]:
    # ties resolve to the first index, matching np.argmax
    row_best = np.argmax(values, axis=1)
    col_best = np.argmax(values, axis=0)
    return {
        (i, int(row_best[i]))
        for i in range(values.shape[0])
        if int(col_best[row_best[i]]) == i
    }


def _itermax(values: np.ndarray, rounds: int) -> set[tuple[int, int]]:
    rows = list(range(values.shape[0]))
    cols = list(range(values.shape[1]))
    selected: set[tuple[int, int]] = set()
    for _ in range(rounds):
        if not rows or not cols:
            break
        fresh = _mutual_argmax(values[np.ix_(rows, cols)])
        if not fresh:
            break
        selected.update((rows[i], cols[j]) for i, j in fresh)
        matched_rows = {rows[i] for i, _ in fresh}
        matched_cols = {cols[j] for _, j in fresh}
        rows = [r for r in rows if r not in matched_rows]
        cols = [c for c in cols if c not in matched_cols]
    return selected
