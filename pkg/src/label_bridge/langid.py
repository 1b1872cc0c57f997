"""Language-identification providers for label verification.

Two interchangeable sources: a precomputed TSV of per-label probability
rows, or the sidecar's ``/langid`` HTTP endpoint. Both return one
probability map per input text; labels absent from a file-mode table get
an empty map, which downstream treats as "ambiguous, keep".
"""

import logging
from pathlib import Path
from typing import Protocol, Sequence

import requests

from .errors import DataError, ProviderUnavailableError

logger = logging.getLogger(__name__)


class LanguageIdProvider(Protocol):
    def probabilities_batch(self, texts: Sequence[str]) -> list[dict[str, float]]:
        """One language → probability map per input text, in order."""
        ...


class FileLanguageIdProvider:
    """Lookups against a TSV of `label<TAB>lang<TAB>prob` rows."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._table: dict[str, dict[str, float]] = {}
        with open(self.path, encoding="utf-8") as fh:
            for line_number, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#") or line == "label\tlang\tprob":
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise DataError(
                        f"{self.path}:{line_number}: expected 3 tab-separated fields"
                    )
                label, lang, prob = parts
                try:
                    value = float(prob)
                except ValueError as exc:
                    raise DataError(
                        f"{self.path}:{line_number}: bad probability {prob!r}"
                    ) from exc
                if not 0.0 <= value <= 1.0:
                    raise DataError(
                        f"{self.path}:{line_number}: probability {value} outside [0,1]"
                    )
                self._table.setdefault(label, {})[lang] = value
        logger.info("loaded language-id table for %d labels from %s", len(self._table), self.path)

    def probabilities_batch(self, texts: Sequence[str]) -> list[dict[str, float]]:
        return [dict(self._table.get(text, {})) for text in texts]


class HttpLanguageIdProvider:
    """Client for the sidecar `/langid` endpoint."""

    def __init__(self, base_url: str, timeout: float = 30.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()

    def probabilities_batch(self, texts: Sequence[str]) -> list[dict[str, float]]:
        if not texts:
            return []
        try:
            response = self._session.post(
                f"{self.base_url}/langid", json={"texts": list(texts)}, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise ProviderUnavailableError(f"language-id service: {exc}") from exc
        if response.status_code >= 500:
            raise ProviderUnavailableError(
                f"language-id service returned {response.status_code}"
            )
        if response.status_code != 200:
            raise DataError(
                f"language-id request rejected ({response.status_code}): {response.text[:200]}"
            )
        payload = response.json()
        results = payload.get("results")
        if not isinstance(results, list) or len(results) != len(texts):
            raise DataError("language-id response shape mismatch")
        out = []
        for entry in results:
            out.append({item["language"]: float(item["probability"]) for item in entry})
        return out
