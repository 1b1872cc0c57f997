"""Cognate similarity from character overlap of romanized sub-words.

Both labels are case-folded, romanized with longest-match-first character
tables, and split on whitespace/hyphens. Sub-words are paired greedily by
descending Levenshtein similarity (one-to-one); an optional bilingual
dictionary forces similarity 1.0 for listed translations. The final score
weights each mapped sub-word pair by its character mass, giving the
proportion of characters covered, in [0, 1].
"""

import re
from typing import Iterable, Mapping, Optional

from ..romanize import RomanizationTables
from ..text import normalize_label

_SUBWORD_SPLIT_RE = re.compile(r"[\s\-]+")

Dictionary = Mapping[str, Iterable[str]]


def levenshtein(a: str, b: str) -> int:
    """Edit distance, two-row dynamic programming."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    """1 − distance / max length; two empty strings count as identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def split_subwords(text: str) -> list[str]:
    return [w for w in _SUBWORD_SPLIT_RE.split(text) if w]


def _is_dictionary_hit(a: str, b: str, dictionary: Optional[Dictionary]) -> bool:
    if dictionary is None:
        return False
    return b in dictionary.get(a, ()) or a in dictionary.get(b, ())


def cognate_similarity(
    label_1: str,
    label_2: str,
    tables: RomanizationTables,
    dictionary: Optional[Dictionary] = None,
) -> float:
    """Character-coverage-weighted sub-word similarity in [0, 1]."""
    words_1 = split_subwords(normalize_label(label_1))
    words_2 = split_subwords(normalize_label(label_2))
    if not words_1 or not words_2:
        return 0.0
    rom_1 = [tables.romanize(w) for w in words_1]
    rom_2 = [tables.romanize(w) for w in words_2]

    cells = []
    for i in range(len(words_1)):
        for j in range(len(words_2)):
            if _is_dictionary_hit(words_1[i], words_2[j], dictionary):
                sim = 1.0
            else:
                sim = levenshtein_similarity(rom_1[i], rom_2[j])
            cells.append((sim, i, j))
    # symmetric greedy: the (min, max) index key orders transposed inputs
    # identically, so score(a, b) == score(b, a)
    cells.sort(key=lambda cell: (-cell[0], min(cell[1], cell[2]), max(cell[1], cell[2])))

    used_1: set[int] = set()
    used_2: set[int] = set()
    covered = 0.0
    for sim, i, j in cells:
        if i in used_1 or j in used_2:
            continue
        used_1.add(i)
        used_2.add(j)
        covered += (len(rom_1[i]) + len(rom_2[j])) * sim
    total = sum(len(w) for w in rom_1) + sum(len(w) for w in rom_2)
    if total == 0:
        return 0.0
    return min(1.0, max(0.0, covered / total))
