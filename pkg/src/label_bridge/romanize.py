"""Romanization of non-Latin scripts via shipped character tables.

Tables are plain TSV files (``source<TAB>replacement``), one per script,
bundled under ``data/romanization/``. Sources are lowercase; callers are
expected to case fold first (``text.normalize_label`` does). Application is
longest-match-first so digraph sources win over their single-character
prefixes. Characters covered by no table pass through unchanged, which is
what keeps comparisons between unmapped scripts merely unhelpful rather
than broken.
"""

from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping


class RomanizationTables:
    """A merged set of source -> replacement rules applied greedily."""

    def __init__(self, rules: Mapping[str, str]):
        self._rules = dict(rules)
        self._max_len = max((len(k) for k in self._rules), default=1)

    @classmethod
    def bundled(cls) -> "RomanizationTables":
        """Load every table shipped with the package."""
        rules: dict[str, str] = {}
        table_dir = resources.files("label_bridge").joinpath("data/romanization")
        for entry in sorted(table_dir.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".tsv"):
                rules.update(_parse_table(entry.read_text(encoding="utf-8").splitlines()))
        return cls(rules)

    @classmethod
    def from_paths(cls, paths: Iterable[Path]) -> "RomanizationTables":
        rules: dict[str, str] = {}
        for path in paths:
            rules.update(_parse_table(Path(path).read_text(encoding="utf-8").splitlines()))
        return cls(rules)

    @classmethod
    def empty(cls) -> "RomanizationTables":
        return cls({})

    def romanize(self, text: str) -> str:
        """Rewrite ``text`` with the longest matching rule at each position."""
        out: list[str] = []
        i = 0
        n = len(text)
        while i < n:
            for width in range(min(self._max_len, n - i), 0, -1):
                chunk = text[i : i + width]
                if chunk in self._rules:
                    out.append(self._rules[chunk])
                    i += width
                    break
            else:
                out.append(text[i])
                i += 1
        return "".join(out)


def _parse_table(lines: Iterable[str]) -> dict[str, str]:
    rules: dict[str, str] = {}
    for line in lines:
        if not line or line.startswith("#"):
            continue
        source, _, replacement = line.partition("\t")
        if source:
            rules[source] = replacement
    return rules
