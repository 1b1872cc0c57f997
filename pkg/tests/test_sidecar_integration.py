"""Integration tests against the embedding sidecar.

These spawn the compiled Node service and talk to it through the HTTP
providers, then check that a store exported by the sidecar's CLI is
interchangeable with live responses. Skipped when the sidecar has not
been built (``cd sidecar && npm install && npm run build``).
"""

import os
import shutil
import socket
import subprocess
import time
from pathlib import Path

import numpy as np
import pytest

from label_bridge import artifacts
from label_bridge.dataset import LabelPair
from label_bridge.embeddings import (
    FileEmbeddingProvider,
    HttpEmbeddingProvider,
    subword_tokens,
)
from label_bridge.errors import DataError, ProviderUnavailableError
from label_bridge.langid import HttpLanguageIdProvider
from label_bridge.scorers import ScorerSuite

SIDECAR = Path(__file__).parent.parent / "sidecar"

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not (SIDECAR / "dist" / "server.js").exists(),
    reason="sidecar not built (sidecar/dist/server.js missing)",
)


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def _spawn(port: int, extra_env: dict | None = None) -> subprocess.Popen:
    import requests

    proc = subprocess.Popen(
        ["node", str(SIDECAR / "dist" / "server.js")],
        env={**os.environ, "PORT": str(port), **(extra_env or {})},
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
    )
    for _ in range(50):
        if proc.poll() is not None:
            raise RuntimeError(proc.stdout.read().decode("utf-8", "replace"))
        try:
            if requests.get(f"http://127.0.0.1:{port}/healthz", timeout=0.5).ok:
                return proc
        except requests.RequestException:
            time.sleep(0.1)
    proc.terminate()
    raise RuntimeError("sidecar did not become healthy")


@pytest.fixture(scope="module")
def sidecar_url():
    port = _free_port()
    proc = _spawn(port)
    yield f"http://127.0.0.1:{port}"
    proc.terminate()
    proc.wait(timeout=10)


LABELS = ["Bahrain", "Бахрейн", "Kingdom of Bahrain", "München", "Café"]


def test_sentence_vectors_shape_and_determinism(sidecar_url):
    provider = HttpEmbeddingProvider(sidecar_url)
    first = provider.sentence_vectors(LABELS, "sentence-a")
    second = provider.sentence_vectors(LABELS, "sentence-a")
    assert first.shape == (len(LABELS), 32)
    assert first.dtype == np.float32
    assert np.array_equal(first, second)
    assert provider.sentence_vectors(["x"], "sentence-b").shape == (1, 48)


def test_subword_tokenization_matches_local_tokenizer(sidecar_url):
    provider = HttpEmbeddingProvider(sidecar_url)
    for label, (tokens, vectors) in zip(
        LABELS, provider.subword_vectors(LABELS, "subword-a")
    ):
        assert tokens == subword_tokens(label)
        assert vectors.shape == (len(tokens), 24)


def test_langid_probabilities_through_provider(sidecar_url):
    provider = HttpLanguageIdProvider(sidecar_url)
    results = provider.probabilities_batch(["Бахрейн", "the United Kingdom"])
    assert len(results) == 2
    top_cyrillic = max(results[0], key=results[0].get)
    assert top_cyrillic in ("ru", "uk", "bg")
    assert max(results[1], key=results[1].get) == "en"
    for table in results:
        assert all(0.0 <= p <= 1.0 for p in table.values())
        assert sum(table.values()) <= 1.0 + 1e-6


def test_exported_store_matches_live_responses(sidecar_url, tmp_path):
    pairs = [
        LabelPair("Q1", "en", "fr", "Bahrain", "Bahreïn", True, True),
        LabelPair("Q2", "de", "en", "München", "Munich", True, True),
    ]
    labels_path = tmp_path / "labels.tsv"
    artifacts.write_dataset(labels_path, pairs)
    store_path = tmp_path / "store.bin"
    export = subprocess.run(
        ["node", str(SIDECAR / "dist" / "export.js"), str(labels_path), str(store_path)],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert export.returncode == 0, export.stdout + export.stderr

    live = HttpEmbeddingProvider(sidecar_url)
    offline = FileEmbeddingProvider(store_path)
    labels = ["Bahrain", "Bahreïn", "München", "Munich"]
    for model in ("sentence-a", "sentence-b"):
        assert np.array_equal(
            offline.sentence_vectors(labels, model), live.sentence_vectors(labels, model)
        )
    for (off_tokens, off_vecs), (live_tokens, live_vecs) in zip(
        offline.subword_vectors(labels, "subword-a"),
        live.subword_vectors(labels, "subword-a"),
    ):
        assert off_tokens == live_tokens
        assert np.array_equal(off_vecs, live_vecs)


def test_scoring_identical_via_http_and_store(sidecar_url, tmp_path):
    pair = LabelPair("Q1", "en", "fr", "Bahrain", "Bahreïn")
    labels_path = tmp_path / "labels.tsv"
    artifacts.write_dataset(labels_path, [pair])
    store_path = tmp_path / "store.bin"
    subprocess.run(
        ["node", str(SIDECAR / "dist" / "export.js"), str(labels_path), str(store_path)],
        check=True,
        capture_output=True,
        timeout=60,
    )
    scorers = ["SIM_A", "SIM_C", "LS_C", "LS_E", "LB_C", "LB_E"]
    via_http = ScorerSuite(scorers, embedding_provider=HttpEmbeddingProvider(sidecar_url))
    via_file = ScorerSuite(scorers, embedding_provider=FileEmbeddingProvider(store_path))
    http_scores = {sp.scorer_id: sp.score for sp in via_http.score_pair(pair)}
    file_scores = {sp.scorer_id: sp.score for sp in via_file.score_pair(pair)}
    assert http_scores == pytest.approx(file_scores, abs=1e-12)


def test_unknown_model_maps_to_data_error(sidecar_url):
    provider = HttpEmbeddingProvider(sidecar_url)
    with pytest.raises(DataError, match="rejected"):
        provider.sentence_vectors(["x"], "bogus-model")


def test_failed_model_load_maps_to_provider_unavailable():
    port = _free_port()
    proc = _spawn(port, {"SIDECAR_FAIL_MODELS": "sentence-a"})
    try:
        provider = HttpEmbeddingProvider(f"http://127.0.0.1:{port}")
        with pytest.raises(ProviderUnavailableError):
            provider.sentence_vectors(["x"], "sentence-a")
        assert provider.sentence_vectors(["x"], "sentence-b").shape == (1, 48)
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_stopped_service_maps_to_provider_unavailable():
    port = _free_port()
    provider = HttpEmbeddingProvider(f"http://127.0.0.1:{port}", timeout=2.0)
    with pytest.raises(ProviderUnavailableError):
        provider.sentence_vectors(["x"], "sentence-a")
