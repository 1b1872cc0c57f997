"""Label string normalization.

Two levels exist on purpose. ``normalize_label`` is the aggressive form used
inside scorers (case is irrelevant when measuring character overlap).
``embedding_key`` keeps case because embedding providers see it, and is the
canonical lookup key shared with vector stores and the embedding sidecar.
Dataset files always carry labels verbatim; neither form is ever written back.
"""

import re
import unicodedata

_WHITESPACE_RE = re.compile(r"\s+")


def embedding_key(label: str) -> str:
    """NFC-normalize and collapse runs of whitespace, preserving case."""
    return _WHITESPACE_RE.sub(" ", unicodedata.normalize("NFC", label)).strip()


def normalize_label(label: str) -> str:
    """Normalize a label for scorer-internal comparison.

    NFC normalization, whitespace collapsed to single spaces, then case
    folded. Raises ``ValueError`` if nothing is left after trimming.
    """
    normalized = embedding_key(label).casefold()
    if not normalized:
        raise ValueError("label is empty after normalization")
    return normalized
