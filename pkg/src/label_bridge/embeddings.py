"""Embedding providers and the binary label-vector store.

Vectors come from one of three sources: a prebuilt store file (offline
mode), the sidecar HTTP service, or a deterministic synthetic generator
used by tests and fixture tooling. All sources key vectors by
(normalized label, granularity, model tag), where normalization is
:func:`label_bridge.text.embedding_key`.

Store file layout (version 1, all integers little-endian):

    bytes 0-3    magic "LBVS"
    byte  4      format version (0x01)
    bytes 5-12   u64 byte offset of the text index
    ...          vector blob, concatenated float32 values
    index        UTF-8 lines: label, granularity, model, dim, offset
                 (in float32 elements), vector count, tokens as JSON —
                 tab-separated

Tabs and newlines cannot survive key normalization, so index lines need
no escaping.
"""

import hashlib
import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol, Sequence

import numpy as np
import requests

from .errors import DataError, ProviderUnavailableError
from .text import embedding_key

logger = logging.getLogger(__name__)

MAGIC = b"LBVS"
VERSION = 1
GRANULARITY_SENTENCE = "sentence"
GRANULARITY_SUBWORDS = "subwords"
#: Word-start marker used by the sub-word tokenizer, SentencePiece-style.
WORD_MARKER = "▁"
_CHUNK = 4


@dataclass
class StoreEntry:
    key: str
    granularity: str
    model: str
    vectors: np.ndarray  # count × dim, float32
    tokens: tuple[str, ...] = ()


class VectorStore:
    """In-memory map of label vectors with a binary file round trip."""

    def __init__(self):
        self._entries: dict[tuple[str, str, str], StoreEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: tuple[str, str, str]) -> bool:
        return key in self._entries

    def entries(self) -> list[StoreEntry]:
        return [self._entries[k] for k in sorted(self._entries)]

    def put(
        self,
        label: str,
        granularity: str,
        model: str,
        vectors: np.ndarray,
        tokens: Sequence[str] = (),
    ) -> None:
        if granularity not in (GRANULARITY_SENTENCE, GRANULARITY_SUBWORDS):
            raise ValueError(f"unknown granularity {granularity!r}")
        vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float32))
        if granularity == GRANULARITY_SUBWORDS and len(tokens) != vectors.shape[0]:
            raise ValueError("token count does not match vector count")
        key = embedding_key(label)
        self._entries[(key, granularity, model)] = StoreEntry(
            key, granularity, model, vectors, tuple(tokens)
        )

    def get(self, label: str, granularity: str, model: str) -> StoreEntry:
        key = (embedding_key(label), granularity, model)
        entry = self._entries.get(key)
        if entry is None:
            raise DataError(
                f"vector store has no entry for {key!r}; re-export the store "
                "with the labels being scored"
            )
        return entry

    def save(self, path: str | Path) -> None:
        entries = self.entries()
        blob_parts = []
        index_lines = []
        offset = 0
        for entry in entries:
            flat = np.ascontiguousarray(entry.vectors, dtype="<f4")
            count, dim = flat.shape
            blob_parts.append(flat.tobytes())
            tokens_json = json.dumps(
                list(entry.tokens), ensure_ascii=False, separators=(",", ":")
            )
            index_lines.append(
                f"{entry.key}\t{entry.granularity}\t{entry.model}"
                f"\t{dim}\t{offset}\t{count}\t{tokens_json}\n"
            )
            offset += count * dim
        blob = b"".join(blob_parts)
        index_offset = 4 + 1 + 8 + len(blob)
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(bytes([VERSION]))
            fh.write(struct.pack("<Q", index_offset))
            fh.write(blob)
            fh.write("".join(index_lines).encode("utf-8"))

    @classmethod
    def load(cls, path: str | Path) -> "VectorStore":
        raw = Path(path).read_bytes()
        if raw[:4] != MAGIC:
            raise DataError(f"{path}: not a vector store (bad magic)")
        if raw[4] != VERSION:
            raise DataError(f"{path}: unsupported store version {raw[4]}")
        (index_offset,) = struct.unpack("<Q", raw[5:13])
        if not 13 <= index_offset <= len(raw):
            raise DataError(f"{path}: index offset out of range")
        values = np.frombuffer(raw[13:index_offset], dtype="<f4")
        store = cls()
        for line_number, line in enumerate(
            raw[index_offset:].decode("utf-8").splitlines(), start=1
        ):
            parts = line.split("\t")
            if len(parts) != 7:
                raise DataError(f"{path}: index line {line_number}: expected 7 fields")
            key, granularity, model, dim_s, offset_s, count_s, tokens_json = parts
            try:
                dim, offset, count = int(dim_s), int(offset_s), int(count_s)
                tokens = json.loads(tokens_json)
            except ValueError as exc:
                raise DataError(f"{path}: index line {line_number}: {exc}") from exc
            end = offset + count * dim
            if end > len(values):
                raise DataError(f"{path}: index line {line_number}: blob overrun")
            vectors = values[offset:end].reshape(count, dim).copy()
            store._entries[(key, granularity, model)] = StoreEntry(
                key, granularity, model, vectors, tuple(tokens)
            )
        return store


def subword_tokens(text: str) -> list[str]:
    """Marker-prefixed chunks of at most 4 characters per word.

    The word-start marker joins chunks back to the normalized input:
    stripping markers and concatenating reproduces the text without its
    spaces.
    """
    normalized = embedding_key(text)
    if not normalized:
        raise DataError("cannot tokenize an empty label")
    tokens = []
    for word in normalized.split(" "):
        for start in range(0, len(word), _CHUNK):
            chunk = word[start : start + _CHUNK]
            tokens.append(WORD_MARKER + chunk if start == 0 else chunk)
    return tokens


class EmbeddingProvider(Protocol):
    def sentence_vectors(self, texts: Sequence[str], model: str) -> np.ndarray:
        """n × dim matrix, one row per input text."""
        ...

    def subword_vectors(
        self, texts: Sequence[str], model: str
    ) -> list[tuple[list[str], np.ndarray]]:
        """Per text: (sub-word strings, count × dim matrix)."""
        ...


class FileEmbeddingProvider:
    """Serves vectors from a prebuilt store; fully offline."""

    def __init__(self, store: VectorStore | str | Path):
        self.store = store if isinstance(store, VectorStore) else VectorStore.load(store)

    def sentence_vectors(self, texts: Sequence[str], model: str) -> np.ndarray:
        rows = [
            self.store.get(t, GRANULARITY_SENTENCE, model).vectors[0] for t in texts
        ]
        return np.stack(rows) if rows else np.zeros((0, 0), dtype=np.float32)

    def subword_vectors(
        self, texts: Sequence[str], model: str
    ) -> list[tuple[list[str], np.ndarray]]:
        out = []
        for t in texts:
            entry = self.store.get(t, GRANULARITY_SUBWORDS, model)
            out.append((list(entry.tokens), entry.vectors))
        return out


class HttpEmbeddingProvider:
    """Client for the sidecar `/embed` endpoint."""

    def __init__(self, base_url: str, timeout: float = 60.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()

    def _post(self, texts: Sequence[str], granularity: str, model: str) -> list[dict]:
        try:
            response = self._session.post(
                f"{self.base_url}/embed",
                json={"texts": list(texts), "granularity": granularity, "model": model},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailableError(f"embedding service: {exc}") from exc
        if response.status_code >= 500:
            raise ProviderUnavailableError(
                f"embedding service returned {response.status_code}"
            )
        if response.status_code != 200:
            raise DataError(
                f"embedding request rejected ({response.status_code}): {response.text[:200]}"
            )
        payload = response.json()
        results = payload.get("results")
        if not isinstance(results, list) or len(results) != len(texts):
            raise DataError("embedding response shape mismatch")
        return results

    def sentence_vectors(self, texts: Sequence[str], model: str) -> np.ndarray:
        if not texts:
            return np.zeros((0, 0), dtype=np.float32)
        results = self._post(texts, GRANULARITY_SENTENCE, model)
        return np.array([r["vector"] for r in results], dtype=np.float32)

    def subword_vectors(
        self, texts: Sequence[str], model: str
    ) -> list[tuple[list[str], np.ndarray]]:
        results = self._post(texts, GRANULARITY_SUBWORDS, model) if texts else []
        return [
            (list(r["tokens"]), np.array(r["vectors"], dtype=np.float32)) for r in results
        ]


class SyntheticEmbeddingProvider:
    """Deterministic pseudo-embeddings derived from text content alone.

    Each (model, granularity, text) triple hashes to an RNG seed, so the
    same input always yields the same unit-norm vector — across processes
    and runs. Not semantically meaningful; exists so scoring logic can be
    exercised without any model.
    """

    DEFAULT_DIMS = {"sentence-a": 32, "sentence-b": 48, "subword-a": 24}

    def __init__(self, dims: Optional[dict[str, int]] = None, default_dim: int = 32):
        self.dims = dict(self.DEFAULT_DIMS if dims is None else dims)
        self.default_dim = default_dim

    def _dim(self, model: str) -> int:
        return self.dims.get(model, self.default_dim)

    def _vector(self, text: str, granularity: str, model: str) -> np.ndarray:
        digest = hashlib.sha256(
            f"{model}|{granularity}|{text}".encode("utf-8")
        ).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        vec = rng.standard_normal(self._dim(model)).astype(np.float32)
        norm = float(np.linalg.norm(vec))
        if norm < 1e-12:  # astronomically unlikely; keep vectors non-degenerate
            vec[0] = 1.0
            norm = 1.0
        return vec / norm

    def sentence_vectors(self, texts: Sequence[str], model: str) -> np.ndarray:
        rows = [
            self._vector(embedding_key(t), GRANULARITY_SENTENCE, model) for t in texts
        ]
        return np.stack(rows) if rows else np.zeros((0, self._dim(model)), dtype=np.float32)

    def subword_vectors(
        self, texts: Sequence[str], model: str
    ) -> list[tuple[list[str], np.ndarray]]:
        out = []
        for text in texts:
            tokens = subword_tokens(text)
            matrix = np.stack(
                [self._vector(tok, GRANULARITY_SUBWORDS, model) for tok in tokens]
            )
            out.append((tokens, matrix))
        return out


class CachingEmbeddingProvider:
    """Memoizes per-label vectors so repeated labels embed once.

    Label pair datasets repeat each label many times across pairs; caching
    keeps file and HTTP providers from redundant lookups. Keys follow the
    provider normalization, so whitespace variants share one slot.
    """

    def __init__(self, inner: EmbeddingProvider):
        self.inner = inner
        self._sentence: dict[tuple[str, str], np.ndarray] = {}
        self._subword: dict[tuple[str, str], tuple[list[str], np.ndarray]] = {}

    def sentence_vectors(self, texts: Sequence[str], model: str) -> np.ndarray:
        keys = [(model, embedding_key(t)) for t in texts]
        missing = sorted({k[1] for k in keys if k not in self._sentence})
        if missing:
            fetched = self.inner.sentence_vectors(missing, model)
            for key, row in zip(missing, fetched):
                self._sentence[(model, key)] = row
        rows = [self._sentence[k] for k in keys]
        return np.stack(rows) if rows else np.zeros((0, 0), dtype=np.float32)

    def subword_vectors(
        self, texts: Sequence[str], model: str
    ) -> list[tuple[list[str], np.ndarray]]:
        keys = [(model, embedding_key(t)) for t in texts]
        missing = sorted({k[1] for k in keys if k not in self._subword})
        if missing:
            fetched = self.inner.subword_vectors(missing, model)
            for key, result in zip(missing, fetched):
                self._subword[(model, key)] = result
        return [self._subword[k] for k in keys]


def export_store(
    provider: EmbeddingProvider,
    labels: Sequence[str],
    sentence_models: Sequence[str],
    subword_models: Sequence[str],
) -> VectorStore:
    """Materialize provider vectors for a label set into a store."""
    unique = sorted({embedding_key(label) for label in labels})
    store = VectorStore()
    for model in sentence_models:
        matrix = provider.sentence_vectors(unique, model)
        for label, row in zip(unique, matrix):
            store.put(label, GRANULARITY_SENTENCE, model, row[np.newaxis, :])
    for model in subword_models:
        for label, (tokens, vectors) in zip(
            unique, provider.subword_vectors(unique, model)
        ):
            store.put(label, GRANULARITY_SUBWORDS, model, vectors, tokens)
    return store
